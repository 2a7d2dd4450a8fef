//! Seed derivation and the generator used for all randomness.
//!
//! Every random stream is a ChaCha8 generator ([`rand_chacha::ChaCha8Rng`])
//! seeded through `seed_from_u64`, whose output is value-stable across
//! platforms and releases. Child streams (one per tree, fold or synthetic
//! trip) are keyed by
//!
//! ```text
//! derive(master, k) = splitmix64(master + k * 0x9E37_79B9_7F4A_7C15)   (wrapping)
//! ```
//!
//! The multiplier is odd, so `k -> master + k * c` is a bijection on `u64`,
//! and the splitmix64 finalizer is a bijection too; `derive` is therefore
//! injective in `k` for a fixed master, which is what keeps parallel and
//! sequential runs identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, k: u64) -> u64 {
    splitmix64(master.wrapping_add(k.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Domain tags keep streams for different purposes apart under one master seed.
pub(crate) mod stream {
    pub const TREE: u64 = 0x7472_6565;
    pub const FOLD: u64 = 0x666f_6c64;
    pub const SPLIT: u64 = 0x7370_6c69;
    pub const TRIP: u64 = 0x7472_6970;
}

pub(crate) fn tagged(master: u64, tag: u64) -> u64 {
    derive(splitmix64(master ^ tag), tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;
    use std::collections::HashSet;


    #[test]
    fn derive_is_injective_over_prefix() {
        for master in [0u64, 1, 7, u64::MAX] {
            let seen: HashSet<u64> = (0..10_000).map(|k| derive(master, k)).collect();
            assert_eq!(seen.len(), 10_000);
        }
    }

    #[test]
    fn generator_is_stable() {
        // frozen first outputs; a change here breaks dataset reproducibility
        let mut r = rng(0);
        let first = [r.next_u64(), r.next_u64()];
        assert_eq!(first, [0xb585_f767_a79a_3b6c, 0x7746_a55f_bad8_c037]);
        assert_eq!(splitmix64(0), 0);
        assert_eq!(splitmix64(1), 0x5692_161D_100B_05E5);
    }
}
