//! Source-only schedules for stars and the single link.

use crate::coding::rs::MAX_PACKETS;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::sim::{Directive, Memory, Planned, RsMemory, Schedule, Setup, View};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Star,
    SingleLink,
}

impl Shape {
    fn check(self, t: &Topology) -> Result<()> {
        let ok = match self {
            Shape::Star => t.is_star(),
            Shape::SingleLink => t.is_single_link(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::TopologyMismatch(format!(
                "schedule needs a {self:?} topology, got n={} with {} edges",
                t.node_count(),
                t.graph().edge_count()
            )))
        }
    }
}

fn leaves(t: &Topology) -> usize {
    t.node_count() - 1
}

/// `log2` of the leaf count of a star (0 for a single link).
pub fn star_log(t: &Topology) -> f64 {
    (leaves(t).max(1) as f64).log2()
}

/// Source retransmits the lowest-index message some node still lacks, until a budget.
#[derive(Debug, Clone)]
pub struct Retransmit {
    shape: Shape,
    budget: Budget,
    limit: u64,
    next: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// `13k + k log2 n` rounds.
    Star,
    /// `4k / (1 - p)` rounds.
    Link { p: f64 },
    Rounds(u64),
}

impl Retransmit {
    pub fn star() -> Self {
        Self { shape: Shape::Star, budget: Budget::Star, limit: 0, next: 0 }
    }

    pub fn single_link(p: f64) -> Self {
        Self { shape: Shape::SingleLink, budget: Budget::Link { p }, limit: 0, next: 0 }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

impl Schedule for Retransmit {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        self.shape.check(setup.topology)?;
        let k = setup.k as f64;
        self.limit = match self.budget {
            Budget::Star => (13.0 * k + k * star_log(setup.topology)).ceil() as u64,
            Budget::Link { p } => (4.0 * k / (1.0 - p)).ceil() as u64,
            Budget::Rounds(r) => r,
        };
        self.next = 0;
        Ok(Box::new(crate::sim::RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, _round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        let (n, k) = (view.topology.node_count(), view.knowledge.k() as u32);
        while self.next < k && view.knowledge.holders(self.next) == n {
            self.next += 1;
        }
        if self.next < k {
            out.push(Planned { node: view.topology.source(), directive: Directive::Message(self.next), wave: false });
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.limit)
    }
}

/// Sends each message a fixed number of times in a row, without feedback.
#[derive(Debug, Clone)]
pub struct Repetition {
    reps: Option<u64>,
    used: u64,
    k: u64,
}

impl Repetition {
    /// `max(1, ceil(100 log2 k))` copies per message unless `reps` is given.
    pub fn new(reps: Option<u64>) -> Self {
        Self { reps, used: 1, k: 0 }
    }

    pub fn reps_for(k: usize) -> u64 {
        ((100.0 * (k as f64).log2()).ceil() as u64).max(1)
    }
}

impl Schedule for Repetition {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        Shape::SingleLink.check(setup.topology)?;
        self.used = self.reps.unwrap_or_else(|| Self::reps_for(setup.k)).max(1);
        self.k = setup.k as u64;
        Ok(Box::new(crate::sim::RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        let i = (round - 1) / self.used;
        if i < self.k {
            out.push(Planned { node: view.topology.source(), directive: Directive::Message(i as u32), wave: false });
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.used * self.k)
    }
}

/// Source sends Reed-Solomon packets `0..m` in order; receivers decode at `k`.
#[derive(Debug, Clone)]
pub struct RsBroadcast {
    shape: Shape,
    m: Option<usize>,
    used: usize,
    verify: bool,
}

impl RsBroadcast {
    /// `100k + 100 log2 n` packets.
    pub fn star() -> Self {
        Self { shape: Shape::Star, m: None, used: 0, verify: true }
    }

    /// `100k` packets.
    pub fn single_link() -> Self {
        Self { shape: Shape::SingleLink, m: None, used: 0, verify: true }
    }

    pub fn with_packets(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    /// Packet count for `k` messages on `t`, capped at the field size.
    pub fn packets_for(shape: Shape, k: usize, t: &Topology) -> usize {
        let m = match shape {
            Shape::Star => 100 * k + (100.0 * star_log(t)).ceil() as usize,
            Shape::SingleLink => 100 * k,
        };
        m.min(MAX_PACKETS)
    }
}

impl Schedule for RsBroadcast {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        self.shape.check(setup.topology)?;
        self.used = self.m.unwrap_or_else(|| Self::packets_for(self.shape, setup.k, setup.topology));
        crate::coding::RsCode::new(setup.k, self.used)?;
        Ok(Box::new(RsMemory::new(setup, self.verify)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        if round as usize <= self.used {
            out.push(Planned { node: view.topology.source(), directive: Directive::Coded(round as u32 - 1), wave: false });
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.used as u64)
    }
}
