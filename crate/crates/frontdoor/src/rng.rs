//! Seed derivation for independent, reproducible random streams.
//!
//! Experiments fan out over graphs, runs, and bootstrap resamples; each unit of
//! work gets its own stream derived from `(root seed, stream index)` so that
//! parallel execution cannot change results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; decorrelates consecutive seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for the stream `index` of the generator rooted at `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(index)))
}

/// RNG rooted directly at `seed` (stream 0).
pub fn root(seed: u64) -> ChaCha8Rng {
    stream(seed, 0)
}
