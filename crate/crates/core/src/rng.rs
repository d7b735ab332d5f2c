//! Seeding conventions.
//!
//! Every random stream is a `ChaCha8Rng` seeded with `seed_from_u64`. Derived
//! streams (per fold, per positive edge, per parameter) take their seed from
//! [`derive_seed`], a SplitMix64 fold over the parent seed and a list of
//! stream keys. Both algorithms have fixed published outputs, so splits and
//! initializations are reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes stream keys into a parent seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, keys: &[u64]) -> Rng {
    rng(derive_seed(seed, keys))
}
