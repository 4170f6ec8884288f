//! Seeded, splittable randomness.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded from a
//! 64-bit seed. Independent streams are derived with [`split`], so work items
//! can be processed in any order (or in parallel) and still reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `label` from `seed`.
pub fn split(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(label.wrapping_add(0x6A09_E667_F3BC_C909)))
}

/// Derives a seed from a path of labels, e.g. `(experiment, n, batch, pair)`.
pub fn split_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &l| split(s, l))
}
