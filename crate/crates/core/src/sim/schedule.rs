//! The interface between schedules and the engine.

use super::memory::{Memory, RlncMemory, RoutingMemory, Setup};
use super::{Knowledge, Packet};
use crate::error::Result;
use crate::graph::{NodeId, Topology};
use crate::rng::Coins;

/// What a schedule asks a node to do. Unknown content degrades to silence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Silent,
    Message(u32),
    /// Whatever the node's memory sends by default (its message, or a coded mix).
    Transmit,
    /// Coded packet with this index.
    Coded(u32),
    Raw(Packet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planned {
    pub node: NodeId,
    pub directive: Directive,
    /// Part of a timed fast wave; used for interference accounting.
    pub wave: bool,
}

/// Read-only state handed to schedules each round.
pub struct View<'a> {
    pub topology: &'a Topology,
    pub knowledge: &'a Knowledge,
    /// Nodes whose behavior can still matter (all nodes when pruning is off).
    pub candidates: &'a [NodeId],
    pub coins: &'a Coins,
    pub(crate) memory: &'a dyn Memory,
}

impl View<'_> {
    pub fn informed(&self, u: NodeId) -> bool {
        self.memory.informed(u, self.knowledge)
    }
}

pub struct RoundReport<'a> {
    pub round: u64,
    /// `(node, transmission went out clean)`; senders see their own fault coin.
    pub broadcasts: &'a [(NodeId, bool)],
    /// `(listener, sender)`.
    pub deliveries: &'a [(NodeId, NodeId)],
}

pub trait Schedule {
    /// Resets per-run state, checks applicability and builds node memory.
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        Ok(Box::new(RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>);

    fn on_round_end(&mut self, _report: &RoundReport<'_>, _view: &View<'_>) {}

    /// Fixed schedule length, if any.
    fn horizon(&self) -> Option<u64> {
        None
    }

    /// True once the schedule has nothing left to do (e.g. budget spent).
    fn halted(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intent {
    Silent,
    Transmit,
    /// Transmit as part of a fast wave.
    Wave,
}

/// A per-node rule depending only on node id, round and private coins.
pub trait NodePolicy {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent;
}

impl<P: NodePolicy + ?Sized> NodePolicy for Box<P> {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent {
        (**self).decide(node, round, coins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    /// Forward the node's known message.
    Routing,
    /// Random linear combinations with `width`-byte payloads.
    Rlnc { width: usize },
}

/// Runs a node policy at every informed node.
pub struct Oblivious<P> {
    pub policy: P,
    pub carrier: Carrier,
}

impl<P: NodePolicy> Oblivious<P> {
    pub fn routing(policy: P) -> Self {
        Self { policy, carrier: Carrier::Routing }
    }

    pub fn rlnc(policy: P, width: usize) -> Self {
        Self { policy, carrier: Carrier::Rlnc { width } }
    }
}

impl<P: NodePolicy> Schedule for Oblivious<P> {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        Ok(match self.carrier {
            Carrier::Routing => Box::new(RoutingMemory::new(setup.k)),
            Carrier::Rlnc { width } => Box::new(RlncMemory::new(setup, width)),
        })
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        for &u in view.candidates {
            if !view.informed(u) {
                continue;
            }
            match self.policy.decide(u, round, view.coins) {
                Intent::Silent => {}
                Intent::Transmit => out.push(Planned { node: u, directive: Directive::Transmit, wave: false }),
                Intent::Wave => out.push(Planned { node: u, directive: Directive::Transmit, wave: true }),
            }
        }
    }
}
