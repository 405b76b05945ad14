//! Deterministic random-number plumbing.
//!
//! Every stochastic component draws from a ChaCha8 stream derived from a
//! single scenario seed plus a fixed stream id, so one `(seed, config)`
//! pair reproduces a run bit-for-bit on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the independent substreams of a scenario.
pub mod stream {
    pub const TOPOLOGY: u64 = 0x01;
    pub const INITIAL_PROFILE: u64 = 0x02;
    /// Base for per-scheme dynamics streams; add the scheme id.
    pub const DYNAMICS: u64 = 0x10;
    /// Base for per-scheme evaluation streams; add the scheme id.
    pub const EVAL: u64 = 0x20;
}

/// Build the RNG for one substream of a seeded scenario.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 mixer, used to derive stateless per-event noise factors.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
