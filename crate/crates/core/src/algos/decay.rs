//! Decay: informed nodes transmit with probability `2^-i` in round `i` of each phase.

use crate::graph::NodeId;
use crate::rng::{Coins, Purpose};
use crate::sim::{Intent, NodePolicy};

/// Default phase length `ceil(2 log2 n)`, at least 1.
pub fn default_phase(n: usize) -> u32 {
    ((2.0 * (n.max(2) as f64).log2()).ceil() as u32).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decay {
    pub phase: u32,
}

impl Decay {
    pub fn new(phase: u32) -> Self {
        Self { phase: phase.max(1) }
    }

    /// Exponent used in `round` (1-based).
    pub fn exponent(&self, round: u64) -> u32 {
        ((round - 1) % self.phase as u64) as u32 + 1
    }
}

/// One Decay coin: transmit with probability `2^-i`.
#[inline]
pub(crate) fn decay_coin(i: u32, round: u64, node: NodeId, coins: &Coins) -> bool {
    coins.pow2_trial(i, round, node as u64, Purpose::Policy)
}

impl NodePolicy for Decay {
    fn decide(&self, node: NodeId, round: u64, coins: &Coins) -> Intent {
        if decay_coin(self.exponent(round), round, node, coins) {
            Intent::Transmit
        } else {
            Intent::Silent
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_cycles() {
        let d = Decay::new(4);
        let e: Vec<u32> = (1..=9).map(|r| d.exponent(r)).collect();
        assert_eq!(e, vec![1, 2, 3, 4, 1, 2, 3, 4, 1]);
        assert_eq!(default_phase(256), 16);
        assert_eq!(default_phase(1), 2);
    }

    #[test]
    fn transmit_frequency_halves() {
        let d = Decay::new(3);
        let coins = Coins::new(11);
        for i in 0..3u64 {
            let hits = (0..30_000u64)
                .filter(|&p| d.decide(5, p * 3 + i + 1, &coins) == Intent::Transmit)
                .count() as f64;
            let expect = 30_000.0 / f64::powi(2.0, i as i32 + 1);
            assert!((hits - expect).abs() < 5.0 * expect.sqrt(), "i={i} hits={hits}");
        }
    }
}
