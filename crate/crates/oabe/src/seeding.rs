//! Deterministic seed derivation.
//!
//! Every stochastic component draws from a stream derived from one master
//! seed, so a full benchmark run is reproducible regardless of how folds are
//! scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; stable across platforms.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for one evaluation fold from the master seed, the
/// dataset name, and the fold index.
pub fn fold_seed(master: u64, dataset_name: &str, fold: usize) -> u64 {
    // FNV-1a over the name, then splitmix over the combination.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in dataset_name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(master ^ mix(h) ^ (fold as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Seeded RNG used everywhere randomness is needed. ChaCha streams are
/// specified byte-for-byte, so seeds reproduce across platforms and releases.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
