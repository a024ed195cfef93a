//! Brute-force reference implementations used to cross-check the fast paths.
//!
//! Everything here goes through `itertools` combinations and `standardize`,
//! sharing no code with the backtracking search or the rank-accumulating
//! census walk.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::perm::{standardize, Host, Permutation};

/// Every pattern of length `k` witnessed by some index subset of `host`.
pub fn brute_force_patterns<H: Host + ?Sized>(host: &H, k: usize) -> BTreeSet<Permutation> {
    let entries = host.entries();
    if k == 0 || k > entries.len() {
        return BTreeSet::new();
    }
    (0..entries.len())
        .combinations(k)
        .filter_map(|idx| {
            let vals: Vec<u32> = idx.iter().map(|&i| entries[i]).collect();
            standardize(&vals).ok()
        })
        .collect()
}

/// Lexicographically smallest witness of `pi` (1-based), by exhaustive search.
pub fn brute_force_witness<H: Host + ?Sized>(host: &H, pi: &Permutation) -> Option<Vec<usize>> {
    let entries = host.entries();
    if pi.len() > entries.len() {
        return None;
    }
    (0..entries.len()).combinations(pi.len()).find_map(|idx| {
        let vals: Vec<u32> = idx.iter().map(|&i| entries[i]).collect();
        (standardize(&vals).ok().as_ref() == Some(pi)).then(|| idx.iter().map(|&i| i + 1).collect())
    })
}
