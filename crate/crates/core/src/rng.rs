//! Counter-based seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! value obtained by mixing a parent seed with an index. Trajectory `i` of an
//! ensemble uses `split(master_seed, i)`; block `b` of a trajectory's noise
//! uses `split(trajectory_seed, b)`. Results therefore depend only on the
//! indices, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 finalizer: a bijective avalanche mix of 64 bits.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Child seed number `index` of `seed`.
pub fn split(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn split_is_deterministic_and_distinct() {
        assert_eq!(split(7, 3), split(7, 3));
        let seeds: HashSet<u64> = (0..10_000).map(|i| split(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(split(1, 0), split(2, 0));
        assert_ne!(split(0, 0), 0);
    }

    #[test]
    fn mix_avalanches() {
        // flipping one input bit flips about half the output bits
        let flips: u32 = (0..64).map(|b| (mix64(12345) ^ mix64(12345 ^ (1 << b))).count_ones()).sum();
        let mean = flips as f64 / 64.0;
        assert!((24.0..=40.0).contains(&mean), "{mean}");
    }
}
