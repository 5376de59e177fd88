//! Node-side state: what a node can put on the air and what it learns.

use super::schedule::Directive;
use super::{Knowledge, Packet, Payload};
use crate::coding::{rlnc_encode, rs_decode_symbols, Interpolant, RlncPacket, RlncState, RsPacket};
use crate::graph::{NodeId, Topology};
use crate::rng::{Coins, Purpose};

/// What a memory is built from.
pub struct Setup<'a> {
    pub topology: &'a Topology,
    pub k: usize,
    pub coins: Coins,
}

impl Setup<'_> {
    /// Random content of message `i`, `width` bytes.
    pub fn message_bytes(&self, i: usize, width: usize) -> Vec<u8> {
        let mut s = self.coins.stream(i as u64, Purpose::Messages);
        (0..width).map(|_| s.next_u8()).collect()
    }

    pub fn message_symbol(&self, i: usize) -> u16 {
        self.coins.stream(i as u64, Purpose::Messages).next_u64() as u16
    }
}

pub trait Memory {
    /// Whether `u` has anything to send.
    fn informed(&self, u: NodeId, kn: &Knowledge) -> bool {
        kn.count(u) > 0
    }

    /// Packet for a directive, or `None` if `u` cannot produce it.
    fn payload(&mut self, u: NodeId, directive: &Directive, round: u64, kn: &Knowledge) -> Option<Packet>;

    /// Absorbs a delivered packet and appends newly known message indices to `learned`.
    fn receive(&mut self, u: NodeId, packet: &Packet, round: u64, kn: &Knowledge, learned: &mut Vec<u32>);

    /// Decodes that disagreed with the true sources.
    fn decode_errors(&self) -> u64 {
        0
    }
}

/// Plain store-and-forward of message indices.
pub struct RoutingMemory {
    k: usize,
}

impl RoutingMemory {
    pub fn new(k: usize) -> Self {
        Self { k }
    }
}

impl Memory for RoutingMemory {
    fn payload(&mut self, u: NodeId, directive: &Directive, _round: u64, kn: &Knowledge) -> Option<Packet> {
        match directive {
            Directive::Message(i) => kn.knows(u, *i).then(|| Packet::message(*i, self.k)),
            // Lowest known message.
            Directive::Transmit => (0..self.k as u32).find(|&i| kn.knows(u, i)).map(|i| Packet::message(i, self.k)),
            Directive::Raw(p) => match p.payload {
                Payload::Message(i) if kn.knows(u, i) => Some(p.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    fn receive(&mut self, u: NodeId, packet: &Packet, _round: u64, kn: &Knowledge, learned: &mut Vec<u32>) {
        if let Payload::Message(i) = packet.payload {
            if (i as usize) < self.k && !kn.knows(u, i) {
                learned.push(i);
            }
        }
    }
}

/// Random linear network coding; complete nodes encode straight from the sources.
pub struct RlncMemory {
    k: usize,
    sources: Vec<Vec<u8>>,
    states: Vec<Option<RlncState>>,
    coins: Coins,
    errors: u64,
}

impl RlncMemory {
    pub fn new(setup: &Setup, width: usize) -> Self {
        let n = setup.topology.node_count();
        let sources: Vec<Vec<u8>> = (0..setup.k).map(|i| setup.message_bytes(i, width)).collect();
        let states = (0..n)
            .map(|u| (u != setup.topology.source()).then(|| RlncState::new(setup.k, width)))
            .collect();
        Self { k: setup.k, sources, states, coins: setup.coins, errors: 0 }
    }

    pub fn rank(&self, u: NodeId) -> usize {
        self.states[u].as_ref().map_or(self.k, |s| s.rank())
    }
}

impl Memory for RlncMemory {
    fn informed(&self, u: NodeId, _kn: &Knowledge) -> bool {
        self.rank(u) > 0
    }

    fn payload(&mut self, u: NodeId, directive: &Directive, round: u64, _kn: &Knowledge) -> Option<Packet> {
        if !matches!(directive, Directive::Transmit) {
            return None;
        }
        let mut rng = self.coins.stream_at(round, u as u64, Purpose::Encode);
        match &self.states[u] {
            Some(state) => rlnc_encode(state, &mut rng).map(Packet::rlnc),
            None => {
                let coeffs: Vec<u8> = (0..self.k).map(|_| rng.next_u8()).collect();
                let mut payload = vec![0u8; self.sources.first().map_or(0, |s| s.len())];
                for (c, m) in coeffs.iter().zip(&self.sources) {
                    crate::coding::gf256::axpy(&mut payload, *c, m);
                }
                Some(Packet::rlnc(RlncPacket { coeffs, payload }))
            }
        }
    }

    fn receive(&mut self, u: NodeId, packet: &Packet, _round: u64, _kn: &Knowledge, learned: &mut Vec<u32>) {
        let Payload::Rlnc(p) = &packet.payload else { return };
        let Some(state) = self.states[u].as_mut() else { return };
        if state.absorb(p).unwrap_or(false) && state.is_full() {
            if state.decode().ok().as_ref() != Some(&self.sources) {
                self.errors += 1;
            }
            self.states[u] = None;
            learned.extend(0..self.k as u32);
        }
    }

    fn decode_errors(&self) -> u64 {
        self.errors
    }
}

/// Reed-Solomon coded broadcast from the source, one symbol per message.
pub struct RsMemory {
    k: usize,
    source: NodeId,
    sources: Vec<Vec<u16>>,
    interp: Interpolant,
    received: Vec<Vec<RsPacket>>,
    seen: Vec<std::collections::HashSet<u32>>,
    verify: bool,
    errors: u64,
}

impl RsMemory {
    pub fn new(setup: &Setup, verify: bool) -> Self {
        let n = setup.topology.node_count();
        let k = setup.k;
        Self {
            k,
            source: setup.topology.source(),
            sources: (0..k).map(|i| vec![setup.message_symbol(i)]).collect(),
            interp: Interpolant::new((0..k as u16).collect()),
            received: vec![Vec::new(); n],
            seen: vec![Default::default(); n],
            verify,
            errors: 0,
        }
    }

    /// Coded packet `j` of the source block.
    pub fn encode(&self, j: u32) -> Vec<u16> {
        if (j as usize) < self.k {
            return self.sources[j as usize].clone();
        }
        let ys: Vec<&[u16]> = self.sources.iter().map(|s| s.as_slice()).collect();
        self.interp.eval_blocks(j as u16, &ys)
    }

    pub fn distinct(&self, u: NodeId) -> usize {
        self.seen[u].len()
    }
}

impl Memory for RsMemory {
    fn informed(&self, u: NodeId, _kn: &Knowledge) -> bool {
        u == self.source || !self.received[u].is_empty()
    }

    fn payload(&mut self, u: NodeId, directive: &Directive, _round: u64, _kn: &Knowledge) -> Option<Packet> {
        let Directive::Coded(j) = *directive else { return None };
        if j as usize >= crate::coding::rs::MAX_PACKETS {
            return None;
        }
        if u == self.source {
            return Some(Packet::rs(0, j, self.encode(j)));
        }
        self.received[u].iter().find(|p| p.index == j).map(|p| Packet::rs(0, j, p.symbols.clone()))
    }

    fn receive(&mut self, u: NodeId, packet: &Packet, _round: u64, kn: &Knowledge, learned: &mut Vec<u32>) {
        let Payload::Rs { index, symbols, .. } = &packet.payload else { return };
        if kn.is_complete(u) || !self.seen[u].insert(*index) {
            return;
        }
        self.received[u].push(RsPacket { index: *index, symbols: symbols.clone() });
        if self.received[u].len() == self.k {
            if self.verify && rs_decode_symbols(&self.received[u], self.k).ok().as_ref() != Some(&self.sources) {
                self.errors += 1;
            }
            learned.extend(0..self.k as u32);
        }
    }

    fn decode_errors(&self) -> u64 {
        self.errors
    }
}
