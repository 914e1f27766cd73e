//! Counter-based seed derivation.
//!
//! A child seed depends only on `(master, index)`, never on the order in
//! which work items are scheduled, so ensembles replay identically for any
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream used for every trial and estimator.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `master`.
#[inline]
pub fn split(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream number `index` derived from `master`.
pub fn child_rng(master: u64, index: u64) -> SimRng {
    rng(split(master, index))
}
