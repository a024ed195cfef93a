//! Exact distinct-pattern counting over all `C(n, k)` index subsets.
//!
//! Subsets are partitioned by their largest index; each part is enumerated
//! depth-first from right to left, which lets the Lehmer rank of the
//! selected pattern be accumulated one entry at a time. Presence for
//! `k <= 12` goes to one shared bitmap via `fetch_or`, larger `k` fold into
//! per-worker rank sets that are unioned at the end. Both merges are
//! order-independent, so the result does not depend on the thread count.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Host, Permutation};
use crate::rank::{unrank_pattern, PatternRank, FACTORIALS, MAX_RANKED_LEN};
use crate::util::binomial;

/// Largest `k` whose presence is tracked with a `k!`-bit bitmap.
pub const BITMAP_MAX_LEN: usize = 12;

/// Default cap on the number of subsets enumerated.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub parallelism: usize,
    pub budget: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            parallelism: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternPresence {
    /// Bit `r` set iff the pattern of rank `r` occurs.
    Bitmap(Vec<u64>),
    /// Sorted ranks of the patterns that occur.
    Ranks(Vec<u64>),
}

impl PatternPresence {
    pub fn contains(&self, rank: PatternRank) -> bool {
        match self {
            PatternPresence::Bitmap(words) => words
                .get((rank.0 / 64) as usize)
                .is_some_and(|w| w >> (rank.0 % 64) & 1 == 1),
            PatternPresence::Ranks(ranks) => ranks.binary_search(&rank.0).is_ok(),
        }
    }

    fn count(&self) -> u64 {
        match self {
            PatternPresence::Bitmap(words) => words.iter().map(|w| w.count_ones() as u64).sum(),
            PatternPresence::Ranks(ranks) => ranks.len() as u64,
        }
    }

    /// Smallest rank below `total` that is absent.
    fn first_missing(&self, total: u64) -> Option<u64> {
        match self {
            PatternPresence::Bitmap(words) => words.iter().enumerate().find_map(|(i, &w)| {
                let r = i as u64 * 64 + (!w).trailing_zeros() as u64;
                (w != u64::MAX && r < total).then_some(r)
            }),
            PatternPresence::Ranks(ranks) => {
                let gap = ranks
                    .iter()
                    .enumerate()
                    .find(|&(i, &r)| r != i as u64)
                    .map(|(i, _)| i as u64)
                    .unwrap_or(ranks.len() as u64);
                (gap < total).then_some(gap)
            }
        }
    }

    /// Little-endian serialization, for bit-for-bit comparisons.
    pub fn to_bytes(&self) -> Vec<u8> {
        let (tag, words) = match self {
            PatternPresence::Bitmap(w) => (0u8, w),
            PatternPresence::Ranks(r) => (1u8, r),
        };
        std::iter::once(tag)
            .chain(words.iter().flat_map(|w| w.to_le_bytes()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCensus {
    pub n: usize,
    pub k: usize,
    pub distinct_count: u64,
    pub total_subsequences: BigUint,
    pub presence: PatternPresence,
}

/// Machine-readable census record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub n: usize,
    pub k: usize,
    pub binom_n_k: String,
    pub distinct: u64,
    pub universal: bool,
    pub missing_pattern: Option<Permutation>,
}

impl PatternCensus {
    pub fn is_universal(&self) -> bool {
        self.distinct_count == FACTORIALS[self.k]
    }

    pub fn contains_pattern(&self, pi: &Permutation) -> bool {
        pi.len() == self.k
            && crate::rank::rank_pattern(pi).is_ok_and(|r| self.presence.contains(r))
    }

    pub fn missing_pattern(&self) -> Option<Permutation> {
        self.presence
            .first_missing(FACTORIALS[self.k])
            .map(|r| unrank_pattern(PatternRank(r), self.k).expect("rank below k!"))
    }

    /// All present patterns, in Lehmer order.
    pub fn patterns(&self) -> Vec<Permutation> {
        let ranks: Vec<u64> = match &self.presence {
            PatternPresence::Ranks(r) => r.clone(),
            PatternPresence::Bitmap(words) => words
                .iter()
                .enumerate()
                .flat_map(|(i, &w)| {
                    (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i as u64 * 64 + b)
                })
                .collect(),
        };
        ranks
            .into_iter()
            .map(|r| unrank_pattern(PatternRank(r), self.k).expect("rank below k!"))
            .collect()
    }

    pub fn summary(&self) -> CensusSummary {
        CensusSummary {
            n: self.n,
            k: self.k,
            binom_n_k: self.total_subsequences.to_string(),
            distinct: self.distinct_count,
            universal: self.is_universal(),
            missing_pattern: self.missing_pattern(),
        }
    }
}

pub(crate) fn check_budget(n: usize, k: usize, budget: u64) -> Result<BigUint> {
    let total = binomial(n as u64, k as u64);
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: total.to_string(),
            budget,
        });
    }
    Ok(total)
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    if parallelism == 0 {
        return Err(Error::InvalidParameter("parallelism must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Visits every size-`k` index subset whose selected entries are pairwise
/// distinct, passing the 0-based increasing indices and the Lehmer rank of
/// the selected pattern. Parts are keyed by the largest index and folded
/// into per-worker accumulators.
pub(crate) fn for_each_subset_par<H, A, I, V, M>(
    host: &H,
    k: usize,
    parallelism: usize,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    H: Host + ?Sized,
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &[usize], u64) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let entries = host.entries();
    let n = entries.len();
    if k == 0 || k > n {
        return Ok(init());
    }
    let check_repeats = !host.entries_distinct();
    let walk = |mut acc: A, last: usize| {
        let mut walker = Walker {
            entries,
            k,
            check_repeats,
            idx: vec![0; k],
            vals: Vec::with_capacity(k),
        };
        walker.descend(last, 0, &mut |idx, rank| visit(&mut acc, idx, rank));
        acc
    };
    if parallelism == 1 {
        return Ok((k - 1..n).fold(init(), walk));
    }
    let pool = thread_pool(parallelism)?;
    Ok(pool.install(|| (k - 1..n).into_par_iter().fold(&init, walk).reduce(&init, &merge)))
}

struct Walker<'a> {
    entries: &'a [u32],
    k: usize,
    check_repeats: bool,
    /// Chosen indices, filled from the back.
    idx: Vec<usize>,
    /// Chosen values, in selection order (right to left).
    vals: Vec<u32>,
}

impl Walker<'_> {
    fn descend<F: FnMut(&[usize], u64)>(&mut self, pos: usize, rank: u64, emit: &mut F) {
        let v = self.entries[pos];
        let depth = self.vals.len();
        let mut smaller = 0u64;
        for &w in &self.vals {
            if w < v {
                smaller += 1;
            } else if self.check_repeats && w == v {
                return;
            }
        }
        let rank = rank + smaller * FACTORIALS[depth];
        self.idx[self.k - 1 - depth] = pos;
        if depth + 1 == self.k {
            emit(&self.idx, rank);
            return;
        }
        self.vals.push(v);
        let still_needed = self.k - depth - 1;
        for next in (still_needed - 1..pos).rev() {
            self.descend(next, rank, emit);
        }
        self.vals.pop();
    }
}

struct AtomicBitmap(Vec<AtomicU64>);

impl AtomicBitmap {
    fn new(bits: u64) -> Self {
        AtomicBitmap((0..bits.div_ceil(64)).map(|_| AtomicU64::new(0)).collect())
    }

    fn set(&self, bit: u64) {
        let word = &self.0[(bit / 64) as usize];
        let mask = 1u64 << (bit % 64);
        if word.load(Ordering::Relaxed) & mask == 0 {
            word.fetch_or(mask, Ordering::Relaxed);
        }
    }

    fn into_words(self) -> Vec<u64> {
        self.0.into_iter().map(AtomicU64::into_inner).collect()
    }
}

/// Exact number of distinct length-`k` patterns in `host`.
pub fn count_distinct_patterns<H: Host + ?Sized>(
    host: &H,
    k: usize,
    opts: CensusOptions,
) -> Result<PatternCensus> {
    let n = host.host_len();
    if k > MAX_RANKED_LEN {
        return Err(Error::Capacity {
            k,
            max: MAX_RANKED_LEN,
        });
    }
    if k == 0 || k > n {
        return Err(Error::SubsetTooLarge { n, k });
    }
    let total = check_budget(n, k, opts.budget)?;
    let presence = if k <= BITMAP_MAX_LEN {
        let bitmap = AtomicBitmap::new(FACTORIALS[k]);
        for_each_subset_par(
            host,
            k,
            opts.parallelism,
            || (),
            |_, _, rank| bitmap.set(rank),
            |_, _| (),
        )?;
        PatternPresence::Bitmap(bitmap.into_words())
    } else {
        let set = for_each_subset_par(
            host,
            k,
            opts.parallelism,
            HashSet::<u64>::new,
            |acc, _, rank| {
                acc.insert(rank);
            },
            |a, b| {
                let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                big.extend(small);
                big
            },
        )?;
        let mut ranks: Vec<u64> = set.into_iter().collect();
        ranks.sort_unstable();
        PatternPresence::Ranks(ranks)
    };
    Ok(PatternCensus {
        n,
        k,
        distinct_count: presence.count(),
        total_subsequences: total,
        presence,
    })
}
