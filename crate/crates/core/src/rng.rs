//! Explicit, splittable seeding. Every random draw in the crate starts from a
//! `u64` seed and a stream tag; there is no global RNG state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used to derive independent generators from one user seed.
pub mod stream {
    pub const SAMPLE: u64 = 0x5a4d_504c;
    pub const NOISE: u64 = 0x4e4f_4953;
    pub const TARGET: u64 = 0x5441_5247;
    pub const CODE: u64 = 0x434f_4445;
    pub const MONTE_CARLO: u64 = 0x4d43_4b4c;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` for the given stream tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag)
}

pub fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tag))
}
