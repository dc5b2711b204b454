//! Keyed reward randomness.
//!
//! Every reward draw is a pure function of `(master seed, run, arm, round)`.
//! A ChaCha8 generator is keyed per `(seed, run)`, its stream id is the arm
//! and its word position is the round, so the draw seen by one arm at one
//! round never depends on which other arms were pulled before.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RewardStream {
    rng: ChaCha8Rng,
}

impl RewardStream {
    pub fn new(seed: u64, run: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&run.to_le_bytes());
        key[16..24].copy_from_slice(b"rewards\0");
        Self {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Uniform draw in `[0, 1)` for `(arm, round)`.
    pub fn uniform(&mut self, arm: usize, round: u64) -> f64 {
        self.rng.set_stream(arm as u64);
        // two 32-bit words per u64 sample
        self.rng.set_word_pos(u128::from(round) * 2);
        self.rng.random::<f64>()
    }

    /// Bernoulli(`mean`) draw for `(arm, round)`.
    pub fn bernoulli(&mut self, arm: usize, round: u64, mean: f64) -> f64 {
        if self.uniform(arm, round) < mean {
            1.0
        } else {
            0.0
        }
    }
}

/// Independent generator for auxiliary randomness (instance generation,
/// Monte Carlo trials), keyed by `(seed, purpose, index)`.
pub fn aux_rng(seed: u64, purpose: &[u8; 8], index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(purpose);
    ChaCha8Rng::from_seed(key)
}
