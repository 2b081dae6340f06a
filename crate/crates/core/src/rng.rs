//! Seeded pseudo-random stream used for every random draw in the toolkit.
//!
//! SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter advanced by the
//! golden-ratio increment and passed through a fixed avalanche mixer. It is
//! trivially portable, so graphs and initial conditions generated from a
//! given seed are identical on every platform and in every language binding.

use std::f64::consts::PI;

/// Name recorded in run metadata.
pub const ALGORITHM: &str = "splitmix64";

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// Standard normal via Box-Muller; consumes exactly two draws per call.
    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

/// Derives an independent child seed from a master seed and an index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut g = SplitMix64::new(master ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    g.next_u64()
}
