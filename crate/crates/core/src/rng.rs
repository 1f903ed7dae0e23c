//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! base seed and a stream id derived from a tuple of indices (trial, method,
//! channel, ...). Two generators with the same key produce the same
//! sequence regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream id for function-value noise.
pub const FUN_NOISE_STREAM: u64 = 0x11;
/// Stream id for gradient noise and minibatch sampling.
pub const GRAD_NOISE_STREAM: u64 = 0x22;
/// Stream id for random problem generation.
pub const PROBLEM_STREAM: u64 = 0x33;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a tuple of indices into one 64-bit stream id.
pub fn stream_id(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5EED_0000_0000_0001, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Generator for `(seed, parts...)`.
pub fn stream_rng(seed: u64, parts: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(parts));
    rng
}
