//! Seeded random streams.
//!
//! Every generator in this crate draws from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! a 64-bit-seeded counter-based stream cipher generator, so a seed fixes the
//! output bit for bit across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` standard normal draws.
pub fn normal_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
