//! Seeded random number generation.
//!
//! Every stochastic routine draws from [`SimRng`], a ChaCha8 generator. A
//! single run is keyed by a 64-bit base seed; replicate `i` of a Monte Carlo
//! experiment uses ChaCha stream `i` of the generator seeded with that base
//! seed (see [`replicate_rng`]). Streams are disjoint 2^64-block sequences, so
//! replicates are independent and their outcomes do not depend on which
//! worker thread happens to run them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for a single seeded draw sequence (stream 0).
pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for replicate `index` of a run keyed by `base_seed`.
pub fn replicate_rng(base_seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index);
    rng
}
