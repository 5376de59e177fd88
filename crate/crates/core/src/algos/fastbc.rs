//! Topology-aware single-message broadcast over a GBST: FASTBC, Robust FASTBC
//! and round repetition.

use super::decay::decay_coin;
use crate::gbst::{BlockPlan, Gbst};
use crate::graph::NodeId;
use crate::rng::Coins;
use crate::sim::{Intent, NodePolicy};

#[derive(Debug, Clone)]
struct FastInfo {
    level: Vec<u32>,
    rank: Vec<u32>,
    fast: Vec<bool>,
    r_max: u32,
}

impl FastInfo {
    fn new(g: &Gbst) -> Self {
        let n = g.node_count();
        Self {
            level: (0..n).map(|u| g.level(u)).collect(),
            rank: (0..n).map(|u| g.rank(u)).collect(),
            fast: (0..n).map(|u| g.is_fast(u)).collect(),
            r_max: g.r_max(),
        }
    }
}

/// `a ≡ b (mod m)` for signed operands.
fn congruent(a: i64, b: i64, m: i64) -> bool {
    (a - b).rem_euclid(m) == 0
}

/// Odd rounds run Decay; in even round `2t` a fast node at `(l, r)` transmits
/// iff `t ≡ l - 6r (mod 6 r_max)`.
#[derive(Debug, Clone)]
pub struct Fastbc {
    info: FastInfo,
    phase: u32,
}

impl Fastbc {
    pub fn new(gbst: &Gbst, phase: u32) -> Self {
        Self { info: FastInfo::new(gbst), phase: phase.max(1) }
    }

    /// Whether fast node `u` is scheduled in fast round `2t`.
    pub fn fast_slot(&self, u: NodeId, t: u64) -> bool {
        let i = &self.info;
        i.fast[u] && congruent(t as i64, i.level[u] as i64 - 6 * i.rank[u] as i64, 6 * i.r_max as i64)
    }
}

impl NodePolicy for Fastbc {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent {
        if round % 2 == 1 {
            let t = (round - 1) / 2;
            let e = (t % self.phase as u64) as u32 + 1;
            return if decay_coin(e, round, node, coins) { Intent::Transmit } else { Intent::Silent };
        }
        if self.fast_slot(node, round / 2) {
            Intent::Wave
        } else {
            Intent::Silent
        }
    }
}

/// Odd rounds run Decay; in even round `t` a fast node at `(l, r)` transmits iff
/// `floor(l/S) - 6r ≡ floor((t/2)/(cS)) (mod 6 r_max)` and `l ≡ t (mod 3)`.
#[derive(Debug, Clone)]
pub struct RobustFastbc {
    info: FastInfo,
    s: u32,
    c: u32,
    phase: u32,
}

impl RobustFastbc {
    pub fn new(gbst: &Gbst, plan: &BlockPlan, phase: u32) -> Self {
        Self { info: FastInfo::new(gbst), s: plan.s, c: plan.c, phase: phase.max(1) }
    }

    pub fn fast_slot(&self, u: NodeId, t: u64) -> bool {
        let i = &self.info;
        if !i.fast[u] || t % 2 == 1 {
            return false;
        }
        let l = i.level[u] as i64;
        let lhs = l / self.s as i64 - 6 * i.rank[u] as i64;
        let rhs = (t / 2 / (self.c as u64 * self.s as u64)) as i64;
        congruent(lhs, rhs, 6 * i.r_max as i64) && congruent(l, t as i64, 3)
    }
}

impl NodePolicy for RobustFastbc {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent {
        if round % 2 == 1 {
            let e = (((round - 1) / 2) % self.phase as u64) as u32 + 1;
            return if decay_coin(e, round, node, coins) { Intent::Transmit } else { Intent::Silent };
        }
        if self.fast_slot(node, round) {
            Intent::Wave
        } else {
            Intent::Silent
        }
    }
}

/// Replays base round `r` in wall rounds `(r-1)*factor+1 ..= r*factor`, with
/// fresh coins in every wall round.
#[derive(Debug, Clone)]
pub struct Repeat<P> {
    pub base: P,
    pub factor: u32,
}

impl<P: NodePolicy> NodePolicy for Repeat<P> {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent {
        if self.factor <= 1 {
            return self.base.decide(node, round, coins);
        }
        let base_round = (round - 1) / self.factor as u64 + 1;
        self.base.decide(node, base_round, &coins.derive(round))
    }
}
