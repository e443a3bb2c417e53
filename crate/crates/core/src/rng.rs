//! Seeded random streams.
//!
//! Every random decision in the crate draws from a ChaCha stream keyed by a
//! 64-bit seed and a stream id derived from the caller's position (sample
//! index, epoch, batch). Results therefore never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// A generator for `seed`, on the stream selected by `path`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(path));
    rng
}

/// SplitMix64 finalizer folded over the path components.
fn mix(path: &[u64]) -> u64 {
    let mut h: u64 = 0x243f_6a88_85a3_08d3;
    for &p in path {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
        h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 29;
    }
    h
}
