//! Seed derivation for reproducible multi-file, multi-stage runs.
//!
//! Every randomized routine takes an explicit RNG; this module defines how
//! a single master seed fans out into independent child streams. Children
//! are derived by chaining a splitmix64 step over the coordinates
//! (file, repetition, stage), so changing any coordinate decorrelates the
//! stream while the same coordinates always reproduce it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One splitmix64 scramble step.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a (file, repetition, stage) cell under `master`.
pub fn child_seed(master: u64, file: u64, rep: u64, stage: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ file);
    s = splitmix64(s ^ rep);
    splitmix64(s ^ stage)
}

/// ChaCha8 stream seeded for a (file, repetition, stage) cell.
pub fn child_rng(master: u64, file: u64, rep: u64, stage: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, file, rep, stage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the splitmix64 reference sequence seeded at 0,
        // obtained by iterating the state 0, 1*golden, 2*golden, ...
        assert_eq!(splitmix64(0), 0xe220a8397b1dcdaf);
        assert_eq!(splitmix64(0x9e3779b97f4a7c15), 0x6e789e6aa1b965f4);
        assert_eq!(splitmix64(0x9e3779b97f4a7c15u64.wrapping_mul(2)), 0x06c45d188009454f);
    }

    #[test]
    fn child_seed_is_deterministic() {
        assert_eq!(child_seed(42, 1, 2, 3), child_seed(42, 1, 2, 3));
    }

    #[test]
    fn child_seed_separates_every_coordinate() {
        let base = child_seed(42, 1, 2, 3);
        assert_ne!(base, child_seed(43, 1, 2, 3));
        assert_ne!(base, child_seed(42, 0, 2, 3));
        assert_ne!(base, child_seed(42, 1, 0, 3));
        assert_ne!(base, child_seed(42, 1, 2, 0));
    }

    #[test]
    fn child_seeds_have_no_easy_collisions() {
        let mut seen = HashSet::new();
        for file in 0..8 {
            for rep in 0..8 {
                for stage in 0..8 {
                    assert!(seen.insert(child_seed(7, file, rep, stage)));
                }
            }
        }
    }
}
