//! SplitMix64 and Floyd's k-of-n sampling.
//!
//! Both are specified bit-for-bit so that a seed selects the same frames on
//! every platform and in every implementation of the pipeline.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// A draw in `[0, bound)` by multiply-shift range reduction (no rejection).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// `k` distinct values from `0..n`, ascending, by Floyd's algorithm.
///
/// # Panics
/// If `k > n`.
pub fn floyd_sample(n: u64, k: u64, rng: &mut SplitMix64) -> Vec<u64> {
    assert!(k <= n, "cannot draw {k} of {n}");
    let mut chosen = BTreeSet::new();
    for j in n - k..n {
        let t = rng.below(j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}
