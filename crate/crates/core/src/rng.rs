//! Counter-based randomness.
//!
//! Every random draw in a simulation is a pure function of
//! `(seed, round, node, purpose, index)`. Draws never depend on iteration
//! order or on how many other draws were made, so skipping a node (or a
//! whole round) leaves every other coin untouched.

/// What a draw is used for. Distinct purposes give independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    SenderFault = 1,
    ReceiverFault = 2,
    Policy = 3,
    Encode = 4,
    Messages = 5,
    Topology = 6,
    Harness = 7,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Keyed generator. Cheap to copy; holds only the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coins {
    seed: u64,
}

impl Coins {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn draw(&self, round: u64, node: u64, purpose: Purpose, index: u64) -> u64 {
        let mut h = mix(self.seed ^ GOLDEN);
        h = mix(h ^ round.wrapping_mul(GOLDEN));
        h = mix(h ^ node.wrapping_add(0x632b_e59b_d9b4_e019));
        h = mix(h ^ (purpose as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
        mix(h ^ index.wrapping_add(0x2545_f491_4f6c_dd1d))
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn unit(&self, round: u64, node: u64, purpose: Purpose, index: u64) -> f64 {
        (self.draw(round, node, purpose, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p`. Never draws when `p <= 0`.
    #[inline]
    pub fn bernoulli(&self, p: f64, round: u64, node: u64, purpose: Purpose, index: u64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        self.unit(round, node, purpose, index) < p
    }

    /// True with probability exactly `2^-exponent`.
    #[inline]
    pub fn pow2_trial(&self, exponent: u32, round: u64, node: u64, purpose: Purpose) -> bool {
        if exponent == 0 {
            return true;
        }
        if exponent >= 64 {
            return false;
        }
        self.draw(round, node, purpose, 0).leading_zeros() >= exponent
    }

    /// Independent generator derived from this one and a salt.
    pub fn derive(&self, salt: u64) -> Coins {
        Coins { seed: mix(mix(self.seed ^ 0x5851_f42d_4c95_7f2d) ^ salt.wrapping_mul(GOLDEN)) }
    }

    /// Sequential generator for bulk draws (message contents, topology edges).
    pub fn stream(&self, node: u64, purpose: Purpose) -> Stream {
        Stream { coins: *self, node, purpose, counter: 0, round: u64::MAX }
    }

    /// Sequential generator bound to one round and node.
    pub fn stream_at(&self, round: u64, node: u64, purpose: Purpose) -> Stream {
        Stream { coins: *self, node, purpose, counter: 0, round }
    }
}

/// A counter-driven stream over one `(round, node, purpose)` key.
#[derive(Debug, Clone)]
pub struct Stream {
    coins: Coins,
    round: u64,
    node: u64,
    purpose: Purpose,
    counter: u64,
}

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        let v = self.coins.draw(self.round, self.node, self.purpose, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u8(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    /// Uniform in `0..bound` (bound > 0), rejection-free multiply-shift.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_keyed() {
        let c = Coins::new(42);
        assert_eq!(c.draw(3, 7, Purpose::Policy, 0), Coins::new(42).draw(3, 7, Purpose::Policy, 0));
        assert_ne!(c.draw(3, 7, Purpose::Policy, 0), c.draw(3, 8, Purpose::Policy, 0));
        assert_ne!(c.draw(3, 7, Purpose::Policy, 0), c.draw(4, 7, Purpose::Policy, 0));
        assert_ne!(c.draw(3, 7, Purpose::Policy, 0), c.draw(3, 7, Purpose::SenderFault, 0));
        assert_ne!(c.draw(3, 7, Purpose::Policy, 0), Coins::new(43).draw(3, 7, Purpose::Policy, 0));
    }

    #[test]
    fn bernoulli_frequency() {
        let c = Coins::new(9);
        let n = 100_000;
        let hits = (0..n).filter(|&i| c.bernoulli(0.3, i, 0, Purpose::Harness, 0)).count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.3).abs() < 0.01, "{f}");
    }

    #[test]
    fn pow2_trial_frequency() {
        let c = Coins::new(5);
        let n = 200_000u64;
        for e in 0..5u32 {
            let hits = (0..n).filter(|&r| c.pow2_trial(e, r, 1, Purpose::Policy)).count();
            let expect = n as f64 / (1u64 << e) as f64;
            assert!((hits as f64 - expect).abs() < 5.0 * expect.sqrt() + 1.0, "e={e} hits={hits}");
        }
    }

    #[test]
    fn below_is_in_range() {
        let mut s = Coins::new(1).stream(0, Purpose::Harness);
        for b in 1..200u64 {
            assert!(s.below(b) < b);
        }
    }
}
