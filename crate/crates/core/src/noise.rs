//! Counter-based Gaussian noise.
//!
//! Every normal deviate is a pure function of a key
//! `(seed, driver, step, level, index)`. The key words are folded one at a
//! time through the SplitMix64 finalizer:
//!
//! ```text
//! h0 = mix(seed ^ 0x6a09e667f3bcc909)
//! h  = mix(h ^ word)        for word in [driver, step, level, index]
//! u1 = (h >> 11) * 2^-53,   u2 = (mix(h ^ 0xbb67ae8584caa73b) >> 11) * 2^-53
//! xi = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//! ```
//!
//! so the noise seen by a driver does not depend on how many substeps other
//! drivers (or earlier parts of the path) needed.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterNoise {
    seed: u64,
}

impl CounterNoise {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn hash(&self, words: [u64; 4]) -> u64 {
        let mut h = mix64(self.seed ^ 0x6a09_e667_f3bc_c909);
        for w in words {
            h = mix64(h ^ w);
        }
        h
    }

    /// Standard normal deviate for the given key.
    pub fn normal(&self, driver: usize, step: u64, level: u32, index: u64) -> f64 {
        let h = self.hash([driver as u64, step, level as u64, index]);
        let u1 = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (mix64(h ^ 0xbb67_ae85_84ca_a73b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
