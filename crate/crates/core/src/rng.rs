//! Seedable, platform-independent random stream.
//!
//! Every random decision in the crate goes through [`SimRng`], so the
//! sequence of draws for a given seed is fixed by the call sequence alone.

use std::f64::consts::{PI, TAU};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::wrap;

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
    seed: u64,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng { inner: ChaCha8Rng::seed_from_u64(seed), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `0..n`. One logical draw.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.inner.random_range(0..n as u64) as usize
    }

    /// Fair coin. One logical draw.
    #[inline]
    pub fn coin(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform angle on `[-π, π)`.
    #[inline]
    pub fn angle(&mut self) -> f64 {
        wrap(-PI + TAU * self.unit())
    }

    /// Uniform on `(-π, π]`, the raw value before canonical wrapping.
    #[inline]
    pub fn angle_upper_closed(&mut self) -> f64 {
        PI - TAU * self.unit()
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed. Order-sensitive.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}
