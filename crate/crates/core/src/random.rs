//! Seeded randomness.
//!
//! Every random quantity is drawn from a ChaCha8 stream identified by a
//! `(seed, stream)` pair, so per-trial generators in parallel runs are
//! reproducible regardless of scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{Occurrence, Permutation};

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream` under master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_permutation(n: usize, seed: u64) -> Result<Permutation> {
    random_permutation_with(n, &mut stream_rng(seed, 0))
}

/// Fisher-Yates shuffle of the identity.
pub fn random_permutation_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let mut v: Vec<u32> = (1..=n as u32).collect();
    v.shuffle(rng);
    Ok(Permutation::from_vec_unchecked(v))
}

pub fn random_subset(n: usize, k: usize, seed: u64) -> Result<Occurrence> {
    random_subset_with(n, k, &mut stream_rng(seed, 0))
}

/// Uniform size-`k` subset of `1..=n`, returned sorted.
pub fn random_subset_with<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Occurrence> {
    Ok(Occurrence::positional_unchecked(sorted_subset(n, k, rng)?))
}

pub(crate) fn sorted_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::SubsetTooLarge { n, k });
    }
    let mut idx: Vec<usize> = rand::seq::index::sample(rng, n, k)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    idx.sort_unstable();
    Ok(idx)
}
