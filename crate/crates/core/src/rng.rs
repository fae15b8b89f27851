//! Seeded random streams.
//!
//! Every stochastic routine draws from a ChaCha8 generator keyed by a 64-bit
//! seed and a stream index, so parallel chains are reproducible regardless
//! of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn normal(rng: &mut Stream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
