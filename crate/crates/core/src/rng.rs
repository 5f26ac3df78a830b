//! Pseudorandom streams for reproducible experiments.
//!
//! All randomness in the crate flows through ChaCha8, a counter-based
//! generator: a stream is a pure function of its 64-bit seed, independent of
//! how many other streams exist or which thread runs it. Experiment harnesses
//! derive one stream per trial from `(base_seed, trial_index)`, which makes
//! serial and parallel execution produce identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream seeded directly from a 64-bit value.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th trial of an experiment with the given base seed.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    base_seed.wrapping_add(index)
}

/// Stream of the `index`-th trial.
pub fn trial_stream(base_seed: u64, index: u64) -> ChaCha8Rng {
    stream(trial_seed(base_seed, index))
}

/// Uniform draw from a closed interval; tolerates degenerate intervals.
pub fn uniform_in(rng: &mut impl rand::Rng, range: (f64, f64)) -> f64 {
    let (lo, hi) = range;
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}
