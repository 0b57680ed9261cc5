//! Seed derivation for deterministic, independent random streams.
//!
//! Every consumer of randomness asks for a stream keyed by
//! `(master_seed, trial, purpose)`. Streams for distinct keys are
//! statistically independent, so adding an algorithm or reordering the
//! experiment never perturbs the channel draws of existing trials.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a child seed from a master seed, trial index and purpose label.
pub fn derive_seed(master: u64, trial: u64, purpose: &str) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ fnv1a(purpose.as_bytes()));
    splitmix64(h ^ trial)
}

/// A seeded generator for the given `(master, trial, purpose)` stream.
pub fn stream(master: u64, trial: u64, purpose: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, trial, purpose))
}
