//! Splittable seed sequence for reproducible parallel Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `master` under label `stream`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(master ^ mix64(stream)).wrapping_add(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream labels, kept distinct so that independent stages never share
/// randomness.
pub mod stream {
    pub const TRIAL: u64 = 1;
    pub const MESSAGES: u64 = 2;
    pub const CHANNEL: u64 = 3;
    pub const BINNING: u64 = 4;
    pub const EXTRACTOR: u64 = 5;
    pub const CODEBOOK: u64 = 6;
    pub const PROTOCOL: u64 = 7;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_differ() {
        assert_ne!(derive(1, stream::TRIAL, 0), derive(1, stream::TRIAL, 1));
        assert_ne!(derive(1, stream::TRIAL, 0), derive(1, stream::CHANNEL, 0));
        assert_eq!(derive(9, 2, 3), derive(9, 2, 3));
    }
}
