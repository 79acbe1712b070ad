//! The repository-wide pseudo random number generator.
//!
//! Every random decision (instance generation, initial solutions, move
//! orders) draws from ChaCha8 seeded through [`SeedableRng::seed_from_u64`].
//! ChaCha8 output is specified independently of platform and word size, so a
//! seed reproduces the same instance and the same search trajectory anywhere.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SearchRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `0..n` in uniformly random order (Fisher-Yates).
pub fn shuffled_identity(n: usize, rng: &mut SearchRng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// All position pairs `(p, q)` with `p < q`, in uniformly random order.
pub fn shuffled_pairs(n: usize, rng: &mut SearchRng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for p in 0..n {
        for q in p + 1..n {
            pairs.push((p, q));
        }
    }
    pairs.shuffle(rng);
    pairs
}
