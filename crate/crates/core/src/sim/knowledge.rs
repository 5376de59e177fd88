//! Who knows which message.

use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowledgeEvent {
    pub round: u64,
    pub node: NodeId,
    pub message: u32,
}

/// Per-node bitsets over `k` messages, plus per-message holder counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Knowledge {
    k: usize,
    words: usize,
    bits: Vec<u64>,
    counts: Vec<u32>,
    holders: Vec<u32>,
    complete: usize,
}

impl Knowledge {
    pub fn new(n: usize, k: usize) -> Self {
        let words = k.div_ceil(64).max(1);
        Self { k, words, bits: vec![0; n * words], counts: vec![0; n], holders: vec![0; k], complete: 0 }
    }

    /// Fresh knowledge where only `source` holds every message.
    pub fn with_source(n: usize, k: usize, source: NodeId) -> Self {
        let mut kn = Self::new(n, k);
        for i in 0..k as u32 {
            kn.learn(source, i);
        }
        kn
    }

    pub fn node_count(&self) -> usize {
        self.counts.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn knows(&self, u: NodeId, i: u32) -> bool {
        let i = i as usize;
        self.bits[u * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    /// Records that `u` knows message `i`; returns whether this is new.
    pub fn learn(&mut self, u: NodeId, i: u32) -> bool {
        let (w, b) = (u * self.words + i as usize / 64, i % 64);
        if self.bits[w] >> b & 1 == 1 {
            return false;
        }
        self.bits[w] |= 1 << b;
        self.counts[u] += 1;
        self.holders[i as usize] += 1;
        if self.counts[u] as usize == self.k {
            self.complete += 1;
        }
        true
    }

    #[inline]
    pub fn count(&self, u: NodeId) -> usize {
        self.counts[u] as usize
    }

    #[inline]
    pub fn is_complete(&self, u: NodeId) -> bool {
        self.counts[u] as usize == self.k
    }

    /// Number of nodes knowing message `i`.
    pub fn holders(&self, i: u32) -> usize {
        self.holders[i as usize] as usize
    }

    pub fn complete_nodes(&self) -> usize {
        self.complete
    }

    pub fn all_complete(&self) -> bool {
        self.complete == self.node_count()
    }

    /// Messages known by `u`, ascending.
    pub fn known(&self, u: NodeId) -> Vec<u32> {
        (0..self.k as u32).filter(|&i| self.knows(u, i)).collect()
    }

    /// Row of `u` as 64-bit words (message `i` is bit `i % 64` of word `i / 64`).
    pub fn row(&self, u: NodeId) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn learn_and_count() {
        let mut kn = Knowledge::with_source(3, 70, 0);
        assert!(kn.is_complete(0));
        assert!(!kn.all_complete());
        assert!(kn.learn(2, 65));
        assert!(!kn.learn(2, 65));
        assert!(kn.knows(2, 65) && !kn.knows(2, 64));
        assert_eq!(kn.holders(65), 2);
        assert_eq!(kn.known(2), vec![65]);
        assert_eq!(kn.complete_nodes(), 1);
    }
}
