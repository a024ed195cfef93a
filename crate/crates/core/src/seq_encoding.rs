//! Patterns in r-ary sequences: symbol counts, gaps between occurrences of
//! a symbol, splits, and the relative-position encoding.
//!
//! An occurrence of `pi` in `seq` over `[k]` is given value-indexed:
//! `t_i` is the position of the entry playing value `i`, so `seq(t_i) = i`.
//! The encoding keeps `t_1, .., t_{k-s}` with `s = floor(c k)` and, for each
//! later `m`, only the vector `psi(m) = (t_m < t_i)_{i < m}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::CensusOptions;
use crate::perm::{extract_pattern, Occurrence, OccurrenceMode, Permutation, RarySequence};
use crate::perm_encoding::{first_occurrences, RoundtripReport};
use crate::prob::bounds::expected_splits_bound;
use crate::random::stream_rng;

pub const DEFAULT_COMMON_FRAC: f64 = 0.1;
pub const DEFAULT_FULL_FRAC: f64 = 0.9;
pub const DEFAULT_WITNESS_FRAC: f64 = 0.03;
pub const DEFAULT_HYPOTHESIS_FRAC: f64 = 0.99;

/// `floor(c k)` with a small guard against products like `0.2 * 5`
/// landing just below an integer.
pub fn suffix_len(c: f64, k: usize) -> usize {
    ((c * k as f64 + 1e-9).floor() as usize).min(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolCounts {
    pub n: usize,
    /// `a_m`, indexed by `m - 1`.
    pub counts: Vec<usize>,
    /// `a_m > common_frac * k`, indexed by `m - 1`.
    pub common: Vec<bool>,
}

impl SymbolCounts {
    pub fn count(&self, m: u32) -> usize {
        self.counts[m as usize - 1]
    }

    pub fn is_common(&self, m: u32) -> bool {
        self.common[m as usize - 1]
    }

    pub fn common_total(&self) -> usize {
        self.common.iter().filter(|&&c| c).count()
    }
}

pub fn symbol_stats(seq: &RarySequence, k: usize, common_frac: f64) -> SymbolCounts {
    let mut counts = vec![0usize; seq.alphabet_size() as usize];
    for &v in seq.as_slice() {
        counts[v as usize - 1] += 1;
    }
    let cut = common_frac * k as f64;
    let common = counts.iter().map(|&a| a as f64 > cut).collect();
    SymbolCounts {
        n: seq.len(),
        counts,
        common,
    }
}

/// The stretch strictly between consecutive occurrences `s_j < s_{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gap {
    /// 1-based gap number.
    pub j: usize,
    pub start: usize,
    pub end: usize,
    /// Occurrences of each other symbol inside the gap; absent symbols omitted.
    pub occupancy: BTreeMap<u32, usize>,
    /// Symbols `m'` with occupancy `>= full_frac * a_{m'}`.
    pub filled_by: Vec<u32>,
}

impl Gap {
    pub fn is_full(&self) -> bool {
        !self.filled_by.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStructure {
    pub m: u32,
    pub full_frac: f64,
    /// `s_1 < .. < s_{a_m}`.
    pub positions: Vec<usize>,
    pub gaps: Vec<Gap>,
    /// Numbers `j` of gaps that are not full.
    pub non_full: Vec<usize>,
}

impl GapStructure {
    pub fn full_count(&self) -> usize {
        self.gaps.len() - self.non_full.len()
    }

    /// `(m', j)` for every symbol filling gap `j`.
    pub fn fillers(&self) -> Vec<(u32, usize)> {
        self.gaps
            .iter()
            .flat_map(|g| g.filled_by.iter().map(move |&s| (s, g.j)))
            .collect()
    }
}

fn check_symbol(seq: &RarySequence, m: u32) -> Result<()> {
    if m == 0 || m > seq.alphabet_size() {
        return Err(Error::ValueOutOfRange {
            value: m as i64,
            r: seq.alphabet_size(),
        });
    }
    Ok(())
}

fn gap_structure(seq: &RarySequence, counts: &SymbolCounts, m: u32, full_frac: f64) -> GapStructure {
    let positions = seq.positions_of(m);
    let mut gaps: Vec<Gap> = positions
        .windows(2)
        .enumerate()
        .map(|(j, w)| Gap {
            j: j + 1,
            start: w[0],
            end: w[1],
            occupancy: BTreeMap::new(),
            filled_by: Vec::new(),
        })
        .collect();
    if let (Some(&first), Some(&last)) = (positions.first(), positions.last()) {
        let mut gap = 0;
        for p in first + 1..last {
            let v = seq.at(p);
            if v == m {
                gap += 1;
            } else {
                *gaps[gap].occupancy.entry(v).or_insert(0) += 1;
            }
        }
    }
    for g in &mut gaps {
        g.filled_by = g
            .occupancy
            .iter()
            .filter(|&(&s, &occ)| occ as f64 >= full_frac * counts.count(s) as f64)
            .map(|(&s, _)| s)
            .collect();
    }
    let non_full = gaps.iter().filter(|g| !g.is_full()).map(|g| g.j).collect();
    GapStructure {
        m,
        full_frac,
        positions,
        gaps,
        non_full,
    }
}

/// Gaps between consecutive occurrences of `m`, with per-gap occupancy and
/// full flags.
pub fn full_gaps(seq: &RarySequence, m: u32, full_frac: f64) -> Result<GapStructure> {
    check_symbol(seq, m)?;
    if full_frac.is_nan() || full_frac <= 0.0 {
        return Err(Error::InvalidParameter(format!("full fraction must be > 0, got {full_frac}")));
    }
    let counts = symbol_stats(seq, 0, 0.0);
    Ok(gap_structure(seq, &counts, m, full_frac))
}

fn sorted_positions(seq: &RarySequence, prefix: &[usize]) -> Result<Vec<usize>> {
    let mut p = prefix.to_vec();
    p.sort_unstable();
    if p.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidOccurrence("prefix indices repeat".into()));
    }
    if let Some(&bad) = p.iter().find(|&&t| t == 0 || t > seq.len()) {
        return Err(Error::IndexOutOfRange { index: bad, n: seq.len() });
    }
    Ok(p)
}

fn splits_in(positions: &[usize], sorted_prefix: &[usize]) -> usize {
    positions
        .windows(2)
        .filter(|w| {
            let at = sorted_prefix.partition_point(|&p| p <= w[0]);
            at < sorted_prefix.len() && sorted_prefix[at] < w[1]
        })
        .count()
}

/// Number of pairs `(s_j, s_{j+1})` of consecutive occurrences of `m` with a
/// prefix index strictly between them.
pub fn count_splits(seq: &RarySequence, m: u32, prefix: &[usize]) -> Result<usize> {
    check_symbol(seq, m)?;
    let p = sorted_positions(seq, prefix)?;
    Ok(splits_in(&seq.positions_of(m), &p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub m: u32,
    pub a_m: usize,
    pub splits: usize,
    pub full_gaps: usize,
    pub common: bool,
}

/// Split and gap summary for every symbol of `seq`.
pub fn split_reports(
    seq: &RarySequence,
    k: usize,
    prefix: &[usize],
    full_frac: f64,
    common_frac: f64,
) -> Result<Vec<SplitReport>> {
    let p = sorted_positions(seq, prefix)?;
    let counts = symbol_stats(seq, k, common_frac);
    Ok((1..=seq.alphabet_size())
        .map(|m| {
            let gs = gap_structure(seq, &counts, m, full_frac);
            SplitReport {
                m,
                a_m: counts.count(m),
                splits: splits_in(&gs.positions, &p),
                full_gaps: gs.full_count(),
                common: counts.is_common(m),
            }
        })
        .collect())
}

/// Distinct vectors `(s < p)_{p in prefix}` over the occurrences `s` of `m`.
pub fn realizable_relpos_count(seq: &RarySequence, m: u32, prefix: &[usize]) -> Result<usize> {
    check_symbol(seq, m)?;
    let p = sorted_positions(seq, prefix)?;
    let vectors: HashSet<Vec<bool>> = seq
        .positions_of(m)
        .into_iter()
        .filter(|s| !p.contains(s))
        .map(|s| prefix.iter().map(|&t| s < t).collect())
        .collect();
    Ok(vectors.len())
}

/// The value-indexed form of a position-ordered occurrence in `seq`.
pub fn value_indexed(seq: &RarySequence, occ: &Occurrence) -> Result<Occurrence> {
    if occ.mode() == OccurrenceMode::ValueIndexed {
        return Ok(occ.clone());
    }
    let pi = extract_pattern(seq, occ)?;
    let mut t = vec![0; occ.len()];
    for (j, &pos) in occ.indices().iter().enumerate() {
        t[pi.at(j + 1) as usize - 1] = pos;
    }
    Occurrence::value_indexed(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqEncoding {
    /// `t_1, .., t_{k-s}`.
    pub prefix: Vec<usize>,
    /// `psi(m)` for `m = k-s+1, .., k`, each of length `m - 1`.
    #[serde(with = "bit_rows")]
    pub relpos: Vec<Vec<bool>>,
}

mod bit_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<bool>], s: S) -> Result<S::Ok, S::Error> {
        let ints: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect();
        ints.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<bool>>, D::Error> {
        use serde::de::Error as _;
        let ints = Vec::<Vec<u8>>::deserialize(d)?;
        ints.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(D::Error::custom(format!("relpos entries are 0 or 1, got {other}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!("c must lie in [0, 1), got {c}")));
    }
    Ok(())
}

pub fn encode_seq(seq: &RarySequence, occ: &Occurrence, c: f64) -> Result<SeqEncoding> {
    check_c(c)?;
    let k = occ.len();
    if seq.alphabet_size() as usize != k {
        return Err(Error::AlphabetMismatch { r: seq.alphabet_size(), k });
    }
    if occ.mode() != OccurrenceMode::ValueIndexed {
        return Err(Error::InvalidOccurrence("the sequence encoding needs a value-indexed occurrence".into()));
    }
    let t = occ.indices();
    for (i, &pos) in t.iter().enumerate() {
        if pos > seq.len() {
            return Err(Error::IndexOutOfRange { index: pos, n: seq.len() });
        }
        if seq.at(pos) as usize != i + 1 {
            return Err(Error::InvalidOccurrence(format!(
                "position {pos} holds {} but plays value {}",
                seq.at(pos),
                i + 1
            )));
        }
    }
    let split = k - suffix_len(c, k);
    Ok(SeqEncoding {
        prefix: t[..split].to_vec(),
        relpos: (split..k).map(|m| t[..m].iter().map(|&ti| t[m] < ti).collect()).collect(),
    })
}

pub fn decode_seq(seq: &RarySequence, enc: &SeqEncoding, c: f64) -> Result<Permutation> {
    check_c(c)?;
    let k = seq.alphabet_size() as usize;
    let split = k - suffix_len(c, k);
    let malformed = |msg: String| Error::MalformedEncoding(msg);
    if enc.prefix.len() != split || enc.relpos.len() != k - split {
        return Err(malformed(format!(
            "expected a prefix of {split} and {} relative-position vectors",
            k - split
        )));
    }
    let mut t = Vec::with_capacity(k);
    for (i, &pos) in enc.prefix.iter().enumerate() {
        if pos == 0 || pos > seq.len() || seq.at(pos) as usize != i + 1 {
            return Err(malformed(format!("prefix entry {pos} does not hold symbol {}", i + 1)));
        }
        t.push(pos);
    }
    for (row, psi) in enc.relpos.iter().enumerate() {
        if psi.len() != split + row {
            return Err(malformed(format!("psi({}) must have length {}", split + row + 1, split + row)));
        }
    }
    let by_symbol = seq.positions_by_symbol();
    if !place_suffix(&by_symbol, &enc.relpos, &mut t) {
        return Err(malformed("no choice of suffix occurrences realizes every psi".into()));
    }
    extract_pattern(seq, &Occurrence::value_indexed(t)?)
}

/// Extends `t` with one occurrence per remaining symbol so that every
/// `psi(m)` holds, taking the leftmost feasible occurrence at each step and
/// backtracking when a later symbol cannot be placed.
fn place_suffix(by_symbol: &[Vec<usize>], relpos: &[Vec<bool>], t: &mut Vec<usize>) -> bool {
    let Some((psi, rest)) = relpos.split_first() else {
        return true;
    };
    let m = t.len();
    for &s in &by_symbol[m] {
        if t.iter().zip(psi).all(|(&ti, &below)| (s < ti) == below) {
            t.push(s);
            if place_suffix(by_symbol, rest, t) {
                return true;
            }
            t.pop();
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeqEncodingCensus {
    pub n: usize,
    pub k: usize,
    pub distinct_patterns: usize,
    pub distinct_encodings: usize,
}

/// Encodes every distinct `k`-pattern of `seq` (with `k = r`) from its
/// lexicographically smallest occurrence and counts distinct outputs.
pub fn census_seq_encodings(seq: &RarySequence, c: f64, opts: CensusOptions) -> Result<SeqEncodingCensus> {
    let k = seq.alphabet_size() as usize;
    let firsts = if k <= seq.len() {
        first_occurrences(seq, k, opts)?
    } else {
        BTreeMap::new()
    };
    let mut encodings = HashSet::new();
    for idx in firsts.values() {
        let occ = value_indexed(seq, &Occurrence::positional(idx.clone())?)?;
        encodings.insert(encode_seq(seq, &occ, c)?);
    }
    Ok(SeqEncodingCensus {
        n: seq.len(),
        k,
        distinct_patterns: firsts.len(),
        distinct_encodings: encodings.len(),
    })
}

/// Checks `decode(encode(T)) = pattern(T)` for every symbol-distinct
/// `k`-subset of positions, `k = r`.
pub fn roundtrip_all_seq(seq: &RarySequence, c: f64, budget: u64) -> Result<RoundtripReport> {
    let k = seq.alphabet_size() as usize;
    let mut report = RoundtripReport {
        occurrences: 0,
        failures: 0,
        first_failure: None,
    };
    if k > seq.len() {
        return Ok(report);
    }
    crate::pattern::check_budget(seq.len(), k, budget)?;
    let values = seq.as_slice();
    for idx in (1..=seq.len()).combinations(k) {
        if idx.iter().map(|&p| values[p - 1]).collect::<BTreeSet<_>>().len() < k {
            continue;
        }
        let occ = Occurrence::positional(idx.clone())?;
        let expected = extract_pattern(seq, &occ)?;
        let ok = value_indexed(seq, &occ)
            .and_then(|t| encode_seq(seq, &t, c))
            .and_then(|enc| decode_seq(seq, &enc, c))
            .is_ok_and(|pi| pi == expected);
        report.record(&idx, ok);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullGapLemmaReport {
    /// At least `hypothesis_frac * k` symbols are common.
    pub applicable: bool,
    pub common: usize,
    /// Common `m` with fewer than `full_frac * a_m` full gaps.
    pub witnesses: Vec<u32>,
    /// `witness_frac * k`.
    pub required: f64,
    /// `witnesses.len() >= required`; `None` when not applicable.
    pub holds: Option<bool>,
}

pub struct LemmaThresholds {
    pub full_frac: f64,
    pub common_frac: f64,
    pub witness_frac: f64,
    pub hypothesis_frac: f64,
}

impl Default for LemmaThresholds {
    fn default() -> Self {
        LemmaThresholds {
            full_frac: DEFAULT_FULL_FRAC,
            common_frac: DEFAULT_COMMON_FRAC,
            witness_frac: DEFAULT_WITNESS_FRAC,
            hypothesis_frac: DEFAULT_HYPOTHESIS_FRAC,
        }
    }
}

/// Collects the common symbols with few full gaps, when enough symbols are
/// common for the count to be meaningful.
pub fn verify_fullgap_lemma(seq: &RarySequence, k: usize, th: &LemmaThresholds) -> FullGapLemmaReport {
    let counts = symbol_stats(seq, k, th.common_frac);
    let common = counts.common_total();
    let required = th.witness_frac * k as f64;
    if (common as f64) < th.hypothesis_frac * k as f64 {
        return FullGapLemmaReport {
            applicable: false,
            common,
            witnesses: Vec::new(),
            required,
            holds: None,
        };
    }
    let witnesses: Vec<u32> = (1..=seq.alphabet_size())
        .into_par_iter()
        .filter(|&m| counts.is_common(m))
        .filter(|&m| {
            let gs = gap_structure(seq, &counts, m, th.full_frac);
            (gs.full_count() as f64) < th.full_frac * counts.count(m) as f64
        })
        .collect();
    let holds = Some(witnesses.len() as f64 >= required);
    FullGapLemmaReport {
        applicable: true,
        common,
        witnesses,
        required,
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSimulation {
    pub m: u32,
    pub a_m: usize,
    pub trials: u64,
    pub prefix_len: usize,
    pub mean_splits: f64,
    pub max_splits: usize,
    /// Non-full gaps of `m`.
    pub non_full: usize,
    /// `a_m - |J| exp(-2.6 prefix_len / |J|)`, if `|J| > 0`.
    pub expected_bound: Option<f64>,
}

/// Draws, independently for each prefix symbol, a uniform occurrence of it,
/// and counts the splits of `m`; trial `t` uses stream `t` of `seed`.
pub fn simulate_splits(
    seq: &RarySequence,
    m: u32,
    prefix_symbols: &[u32],
    full_frac: f64,
    trials: u64,
    seed: u64,
) -> Result<SplitSimulation> {
    check_symbol(seq, m)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let by_symbol = seq.positions_by_symbol();
    let mut chosen = BTreeSet::new();
    for &i in prefix_symbols {
        check_symbol(seq, i)?;
        if i == m || !chosen.insert(i) {
            return Err(Error::InvalidParameter(format!("prefix symbol {i} repeats or equals m")));
        }
        if by_symbol[i as usize - 1].is_empty() {
            return Err(Error::InvalidParameter(format!("symbol {i} does not occur")));
        }
    }
    let positions = &by_symbol[m as usize - 1];
    let per_trial: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let mut prefix: Vec<usize> = prefix_symbols
                .iter()
                .map(|&i| {
                    let occ = &by_symbol[i as usize - 1];
                    occ[rng.random_range(0..occ.len())]
                })
                .collect();
            prefix.sort_unstable();
            splits_in(positions, &prefix)
        })
        .collect();
    let total: u64 = per_trial.iter().map(|&x| x as u64).sum();
    let gs = full_gaps(seq, m, full_frac)?;
    let j = gs.non_full.len();
    Ok(SplitSimulation {
        m,
        a_m: positions.len(),
        trials,
        prefix_len: prefix_symbols.len(),
        mean_splits: total as f64 / trials as f64,
        max_splits: per_trial.iter().copied().max().unwrap_or(0),
        non_full: j,
        expected_bound: (j > 0)
            .then(|| expected_splits_bound(positions.len() as f64, j as f64, prefix_symbols.len() as f64))
            .transpose()?,
    })
}
