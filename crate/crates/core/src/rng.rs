//! Seeded random streams.
//!
//! Every trial of a campaign draws from its own ChaCha20 stream whose seed is
//! derived from the master seed with a SplitMix64 step:
//! `child = mix(master + GAMMA * (trial + 1))`. The derivation depends only on
//! `(master, trial)`, so serial and parallel execution see identical streams.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type RandomStream = ChaCha20Rng;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`.
pub fn child_seed(master: u64, trial: u64) -> u64 {
    mix(master.wrapping_add(GAMMA.wrapping_mul(trial.wrapping_add(1))))
}

pub fn stream(seed: u64) -> RandomStream {
    ChaCha20Rng::seed_from_u64(seed)
}
