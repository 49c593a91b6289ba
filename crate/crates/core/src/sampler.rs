//! Seeded source of generic rational points.
//!
//! Integer points of bounded height are generic for every Zariski-open
//! condition that shows up here, and keeping the height small keeps the
//! exact arithmetic fast. Numerators are uniform in `[-height, height]`
//! with denominator 1, independent per coordinate.

use crate::qlinalg::{rat_int, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_HEIGHT: i64 = 10;

#[derive(Debug, Clone)]
pub struct RationalSampler {
    rng: ChaCha8Rng,
    height: i64,
    seed: u64,
}

impl RationalSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_height(seed, DEFAULT_HEIGHT)
    }

    pub fn with_height(seed: u64, height: i64) -> Self {
        assert!(height >= 1);
        RationalSampler { rng: ChaCha8Rng::seed_from_u64(seed), height, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&mut self) -> Rational {
        rat_int(self.rng.random_range(-self.height..=self.height))
    }

    pub fn sample_vec(&mut self, len: usize) -> Vec<Rational> {
        (0..len).map(|_| self.sample()).collect()
    }

    /// A tuple of `count` vectors of the given dimension.
    pub fn sample_tuple(&mut self, count: usize, dim: usize) -> Vec<Vec<Rational>> {
        (0..count).map(|_| self.sample_vec(dim)).collect()
    }
}
