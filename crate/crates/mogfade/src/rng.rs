//! Deterministic per-stream generators for chunked sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashed key for one (seed, stream) pair; feeds generators directly and
/// derives sub-seeds when one stream delegates to a sampler that does its
/// own chunking.
pub(crate) fn stream_key(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Generator for one (seed, stream) pair. Streams are decorrelated by
/// hashing, so chunks can be produced in any order, or on any number of
/// threads, with bit-identical output.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(stream_key(seed, stream))
}
