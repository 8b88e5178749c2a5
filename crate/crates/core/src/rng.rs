//! Deterministic RNG streams.
//!
//! Every randomized routine in this crate takes either an explicit RNG or an
//! explicit `u64` seed. Batch simulation derives one independent ChaCha
//! stream per sample index, so results do not depend on how work is split
//! across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; the standard 64-bit mixer.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with a stream label (e.g. a sample index) into a fresh seed.
#[inline]
pub fn mix(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label.wrapping_add(0xa076_1d64_78bd_642f)))
}

/// The RNG substream for sample `index` under `seed`. Streams with
/// different indices are independent ChaCha streams of the same key.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A free-standing seeded RNG for internal randomized algorithms.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
