//! Pattern containment, occurrence enumeration, distinct-pattern counting
//! and universality checks.

mod census;
pub mod oracle;

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

pub use census::{
    count_distinct_patterns, CensusOptions, CensusSummary, PatternCensus, PatternPresence,
    BITMAP_MAX_LEN, DEFAULT_BUDGET,
};
pub(crate) use census::{check_budget, for_each_subset_par};

use crate::error::{Error, Result};
use crate::perm::{Host, Occurrence, Permutation, RarySequence};
use crate::rank::{factorial, unrank_pattern, PatternRank};

/// Largest `k` for which `is_universal` walks all of `S_k`.
pub const UNIVERSALITY_MAX_LEN: usize = 12;

/// Per-position comparison anchors for a pattern: for each `i`, the earlier
/// position holding the closest smaller value and the closest larger value.
struct Anchors {
    lower: Vec<Option<usize>>,
    upper: Vec<Option<usize>>,
}

impl Anchors {
    fn new(pi: &[u32]) -> Self {
        let k = pi.len();
        let mut lower = vec![None; k];
        let mut upper = vec![None; k];
        for i in 0..k {
            for j in 0..i {
                if pi[j] < pi[i] {
                    if lower[i].is_none_or(|l: usize| pi[l] < pi[j]) {
                        lower[i] = Some(j);
                    }
                } else if upper[i].is_none_or(|u: usize| pi[u] > pi[j]) {
                    upper[i] = Some(j);
                }
            }
        }
        Anchors { lower, upper }
    }
}

/// Depth-first search over positions in increasing order, so witnesses
/// are produced in lexicographic order.
fn search<F>(host: &[u32], anchors: &Anchors, chosen: &mut Vec<usize>, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let k = anchors.lower.len();
    let depth = chosen.len();
    if depth == k {
        return visit(chosen);
    }
    let start = chosen.last().map_or(0, |&p| p + 1);
    let stop = host.len() + depth + 1 - k;
    let lo = anchors.lower[depth].map(|j| host[chosen[j]]);
    let hi = anchors.upper[depth].map(|j| host[chosen[j]]);
    for pos in start..stop {
        let v = host[pos];
        if lo.is_some_and(|l| v <= l) || hi.is_some_and(|h| v >= h) {
            continue;
        }
        chosen.push(pos);
        let flow = search(host, anchors, chosen, visit);
        chosen.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

fn to_occurrence(zero_based: &[usize]) -> Occurrence {
    Occurrence::positional_unchecked(zero_based.iter().map(|&p| p + 1).collect())
}

/// Lexicographically smallest occurrence of `pi` in `host`, if any.
pub fn contains<H: Host + ?Sized>(host: &H, pi: &Permutation) -> Option<Occurrence> {
    let entries = host.entries();
    if pi.len() > entries.len() {
        return None;
    }
    let anchors = Anchors::new(pi.as_slice());
    let mut found = None;
    let mut chosen = Vec::with_capacity(pi.len());
    let _ = search(entries, &anchors, &mut chosen, &mut |occ| {
        found = Some(to_occurrence(occ));
        ControlFlow::Break(())
    });
    found
}

/// Occurrences of `pi` in lexicographic order, at most `limit` of them.
pub fn enumerate_occurrences<H: Host + ?Sized>(
    host: &H,
    pi: &Permutation,
    limit: usize,
) -> Result<Vec<Occurrence>> {
    if limit == 0 {
        return Err(Error::InvalidParameter("limit must be >= 1".into()));
    }
    let entries = host.entries();
    let mut out = Vec::new();
    if pi.len() > entries.len() {
        return Ok(out);
    }
    let anchors = Anchors::new(pi.as_slice());
    let mut chosen = Vec::with_capacity(pi.len());
    let _ = search(entries, &anchors, &mut chosen, &mut |occ| {
        out.push(to_occurrence(occ));
        if out.len() == limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalityReport {
    pub k: usize,
    pub universal: bool,
    /// Lehmer-least pattern that is not contained.
    pub missing_pattern: Option<Permutation>,
}

/// Checks every pattern of `S_k` with `contains`.
pub fn is_universal<H: Host + ?Sized>(host: &H, k: usize) -> Result<UniversalityReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if k > UNIVERSALITY_MAX_LEN {
        return Err(Error::Capacity {
            k,
            max: UNIVERSALITY_MAX_LEN,
        });
    }
    let total = factorial(k)?;
    let missing = (0..total).into_par_iter().find_first(|&r| {
        let pi = unrank_pattern(PatternRank(r), k).expect("rank below k!");
        contains(host, &pi).is_none()
    });
    Ok(UniversalityReport {
        k,
        universal: missing.is_none(),
        missing_pattern: missing.map(|r| unrank_pattern(PatternRank(r), k).expect("rank below k!")),
    })
}

/// `(1, 2, ..., k)` repeated `k` times over the alphabet `[k]`.
pub fn construct_repeated_identity(k: usize) -> Result<RarySequence> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let values = (0..k).flat_map(|_| 1..=k as u32).collect();
    RarySequence::new(values, k as u32)
}
