//! Width-based encoding of patterns contained in a permutation.
//!
//! For an occurrence `t_1 < .. < t_k` (odd `k`) the width around an even
//! index `i` is `b_i = t_{i+1} - t_{i-1}`. When at least `floor(c k)` widths
//! reach `d n / k`, the smallest such even indices form `I`, and the pattern
//! is stored as `(I, (t_i)_{i not in I}, (pi(i))_{i in I})`. Otherwise the
//! occurrence itself is stored.

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{check_budget, for_each_subset_par, CensusOptions};
use crate::perm::{extract_pattern, Occurrence, OccurrenceMode, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingParams {
    /// Fraction of `k` that must be covered by wide positions.
    pub c: f64,
    /// Width threshold in units of `n / k`.
    pub d: f64,
    pub n: usize,
    pub k: usize,
}

/// Defaults for `c` and `d`; at desk-scale `k` they give `floor(c k) = 0`.
pub const DEFAULT_C: f64 = 0.00075;
pub const DEFAULT_D: f64 = 8.180;

impl EncodingParams {
    pub fn new(c: f64, d: f64, n: usize, k: usize) -> Result<EncodingParams> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!("c must lie in (0, 1), got {c}")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d must be > 0, got {d}")));
        }
        if k == 0 || k > n {
            return Err(Error::SubsetTooLarge { n, k });
        }
        if k.is_multiple_of(2) {
            return Err(Error::EvenPatternLength(k));
        }
        Ok(EncodingParams { c, d, n, k })
    }

    /// `floor(c k)`, the size of `I` in Case 2.
    pub fn selected_count(&self) -> usize {
        // absorb rounding in products such as 0.2 * 5
        (self.c * self.k as f64 + 1e-9).floor() as usize
    }

    /// `d n / k`.
    pub fn threshold(&self) -> f64 {
        self.d * self.n as f64 / self.k as f64
    }

    fn qualifies(&self, width: usize) -> bool {
        width as f64 * self.k as f64 >= self.d * self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthProfile {
    /// `b_i` keyed by even `i`.
    pub widths: BTreeMap<usize, usize>,
    pub threshold: f64,
    /// Even `i` with `b_i >= threshold`, ascending.
    pub qualifying: Vec<usize>,
}

/// Widths from the odd-indexed entries; `at(j)` returns `t_j` for odd `j`.
fn profile_from<F: Fn(usize) -> usize>(k: usize, params: &EncodingParams, at: F) -> WidthProfile {
    let mut widths = BTreeMap::new();
    let mut qualifying = Vec::new();
    for i in (2..k).step_by(2) {
        let b = at(i + 1) - at(i - 1);
        widths.insert(i, b);
        if params.qualifies(b) {
            qualifying.push(i);
        }
    }
    WidthProfile {
        widths,
        threshold: params.threshold(),
        qualifying,
    }
}

fn check_positional(occ: &Occurrence, params: &EncodingParams) -> Result<()> {
    if occ.mode() != OccurrenceMode::PositionOrdered {
        return Err(Error::InvalidOccurrence("widths need a position-ordered occurrence".into()));
    }
    if occ.len().is_multiple_of(2) {
        return Err(Error::EvenPatternLength(occ.len()));
    }
    if occ.len() != params.k {
        return Err(Error::InvalidOccurrence(format!(
            "occurrence has {} indices but k = {}",
            occ.len(),
            params.k
        )));
    }
    if let Some(&bad) = occ.indices().iter().find(|&&t| t > params.n) {
        return Err(Error::IndexOutOfRange { index: bad, n: params.n });
    }
    Ok(())
}

pub fn compute_widths(occ: &Occurrence, params: &EncodingParams) -> Result<WidthProfile> {
    check_positional(occ, params)?;
    let t = occ.indices();
    Ok(profile_from(params.k, params, |j| t[j - 1]))
}

/// The `floor(c k)` smallest qualifying even indices, or `None` when there
/// are too few of them (or `floor(c k) = 0`) and Case 1 applies.
pub fn select_indices(profile: &WidthProfile, params: &EncodingParams) -> Option<Vec<usize>> {
    let s = params.selected_count();
    (s > 0 && profile.qualifying.len() >= s).then(|| profile.qualifying[..s].to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PermEncoding {
    /// The occurrence `t_1, .., t_k`.
    Case1 { indices: Vec<usize> },
    /// `I`, the `t_i` for `i` outside `I` in increasing `i`, and `pi(i)` for
    /// `i` in `I` aligned with `I`.
    Case2 {
        selected: Vec<usize>,
        kept: Vec<usize>,
        relvals: Vec<u32>,
    },
}

impl PermEncoding {
    pub fn case(&self) -> u8 {
        match self {
            PermEncoding::Case1 { .. } => 1,
            PermEncoding::Case2 { .. } => 2,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEncoding {
    case: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    indices: Option<Vec<usize>>,
    #[serde(rename = "I", skip_serializing_if = "Option::is_none")]
    selected: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kept: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relvals: Option<Vec<u32>>,
}

impl Serialize for PermEncoding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self.clone() {
            PermEncoding::Case1 { indices } => RawEncoding {
                case: 1,
                indices: Some(indices),
                selected: None,
                kept: None,
                relvals: None,
            },
            PermEncoding::Case2 {
                selected,
                kept,
                relvals,
            } => RawEncoding {
                case: 2,
                indices: None,
                selected: Some(selected),
                kept: Some(kept),
                relvals: Some(relvals),
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermEncoding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawEncoding::deserialize(d)?;
        match raw {
            RawEncoding {
                case: 1,
                indices: Some(indices),
                selected: None,
                kept: None,
                relvals: None,
            } => Ok(PermEncoding::Case1 { indices }),
            RawEncoding {
                case: 2,
                indices: None,
                selected: Some(selected),
                kept: Some(kept),
                relvals: Some(relvals),
            } => Ok(PermEncoding::Case2 {
                selected,
                kept,
                relvals,
            }),
            _ => Err(D::Error::custom(
                "expected {\"case\":1,\"indices\":[..]} or {\"case\":2,\"I\":[..],\"kept\":[..],\"relvals\":[..]}",
            )),
        }
    }
}

fn check_host(host: &Permutation, params: &EncodingParams) -> Result<()> {
    if host.len() != params.n {
        return Err(Error::InvalidParameter(format!(
            "params are for n = {} but the host has length {}",
            params.n,
            host.len()
        )));
    }
    Ok(())
}

pub fn encode_perm(host: &Permutation, occ: &Occurrence, params: &EncodingParams) -> Result<PermEncoding> {
    check_host(host, params)?;
    let profile = compute_widths(occ, params)?;
    let t = occ.indices();
    let Some(selected) = select_indices(&profile, params) else {
        return Ok(PermEncoding::Case1 { indices: t.to_vec() });
    };
    let pi = extract_pattern(host, occ)?;
    let relvals = selected.iter().map(|&i| pi.at(i)).collect();
    let kept = (1..=params.k)
        .filter(|i| selected.binary_search(i).is_err())
        .map(|i| t[i - 1])
        .collect();
    Ok(PermEncoding::Case2 {
        selected,
        kept,
        relvals,
    })
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedEncoding(msg.into())
}

fn check_increasing(name: &str, v: &[usize], n: usize) -> Result<()> {
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(malformed(format!("{name} must be strictly increasing")));
    }
    if let Some(&bad) = v.iter().find(|&&t| t == 0 || t > n) {
        return Err(malformed(format!("{name} entry {bad} outside 1..{n}")));
    }
    Ok(())
}

pub fn decode_perm(host: &Permutation, enc: &PermEncoding, params: &EncodingParams) -> Result<Permutation> {
    check_host(host, params)?;
    let k = params.k;
    match enc {
        PermEncoding::Case1 { indices } => {
            if indices.len() != k {
                return Err(malformed(format!("expected {k} indices, got {}", indices.len())));
            }
            check_increasing("indices", indices, params.n)?;
            extract_pattern(host, &Occurrence::positional(indices.clone())?)
        }
        PermEncoding::Case2 {
            selected,
            kept,
            relvals,
        } => decode_case2(host, selected, kept, relvals, params),
    }
}

fn decode_case2(
    host: &Permutation,
    selected: &[usize],
    kept: &[usize],
    relvals: &[u32],
    params: &EncodingParams,
) -> Result<Permutation> {
    let k = params.k;
    let s = params.selected_count();
    if selected.len() != s || s == 0 {
        return Err(malformed(format!("|I| = {} but floor(ck) = {s}", selected.len())));
    }
    if selected.windows(2).any(|w| w[0] >= w[1])
        || selected.iter().any(|&i| i % 2 == 1 || i < 2 || i >= k)
    {
        return Err(malformed("I must be increasing even indices strictly between 1 and k"));
    }
    if kept.len() != k - s {
        return Err(malformed(format!("expected {} kept indices, got {}", k - s, kept.len())));
    }
    check_increasing("kept", kept, params.n)?;
    if relvals.len() != s {
        return Err(malformed(format!("expected {s} relvals, got {}", relvals.len())));
    }
    let mut seen = HashSet::new();
    for &v in relvals {
        if v == 0 || v as usize > k || !seen.insert(v) {
            return Err(malformed("relvals must be distinct values in 1..k"));
        }
    }

    // t_i for every i outside I, by i
    let mut slot: Vec<Option<usize>> = vec![None; k + 1];
    let outside: Vec<usize> = (1..=k).filter(|i| selected.binary_search(i).is_err()).collect();
    for (&i, &t) in outside.iter().zip(kept) {
        slot[i] = Some(t);
    }
    let profile = profile_from(k, params, |j| slot[j].expect("odd indices are never selected"));
    if select_indices(&profile, params).as_deref() != Some(selected) {
        return Err(malformed("I does not match the widths of the kept odd entries"));
    }
    if selected.iter().any(|i| profile.widths[i] < 2) {
        return Err(malformed("a selected width leaves no room for its middle index"));
    }

    // values not in relvals, handed out in the order of sigma on kept indices
    let free: Vec<u32> = (1..=k as u32).filter(|v| !seen.contains(v)).collect();
    let mut order = outside;
    order.sort_by_key(|&i| host.at(slot[i].expect("every index outside I is kept")));
    let mut pi = vec![0u32; k];
    for (&i, v) in order.iter().zip(free) {
        pi[i - 1] = v;
    }
    for (&i, &v) in selected.iter().zip(relvals) {
        pi[i - 1] = v;
    }
    Permutation::new(pi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodingCensus {
    pub n: usize,
    pub k: usize,
    pub distinct_patterns: usize,
    pub distinct_encodings: usize,
    pub case1: usize,
    pub case2: usize,
}

impl EncodingCensus {
    pub fn injective(&self) -> bool {
        self.distinct_patterns == self.distinct_encodings
    }
}

/// Lexicographically smallest occurrence of every pattern, keyed by rank.
pub(crate) fn first_occurrences<H: crate::perm::Host + ?Sized>(
    host: &H,
    k: usize,
    opts: CensusOptions,
) -> Result<BTreeMap<u64, Vec<usize>>> {
    check_budget(host.host_len(), k, opts.budget)?;
    let keep_min = |map: &mut HashMap<u64, Vec<usize>>, idx: Vec<usize>, rank: u64| {
        map.entry(rank)
            .and_modify(|cur| {
                if idx < *cur {
                    *cur = idx.clone();
                }
            })
            .or_insert(idx);
    };
    let map = for_each_subset_par(
        host,
        k,
        opts.parallelism,
        HashMap::new,
        |acc, idx, rank| keep_min(acc, idx.iter().map(|p| p + 1).collect(), rank),
        |mut a, b| {
            for (rank, idx) in b {
                keep_min(&mut a, idx, rank);
            }
            a
        },
    )?;
    Ok(map.into_iter().collect())
}

/// Encodes every distinct pattern of `host` from its lexicographically
/// smallest occurrence and counts distinct outputs.
pub fn census_encodings(
    host: &Permutation,
    params: &EncodingParams,
    opts: CensusOptions,
) -> Result<EncodingCensus> {
    check_host(host, params)?;
    let firsts = first_occurrences(host, params.k, opts)?;
    let mut encodings = HashSet::new();
    let (mut case1, mut case2) = (0, 0);
    for idx in firsts.values() {
        let enc = encode_perm(host, &Occurrence::positional_unchecked(idx.clone()), params)?;
        match enc.case() {
            1 => case1 += 1,
            _ => case2 += 1,
        }
        encodings.insert(enc);
    }
    Ok(EncodingCensus {
        n: params.n,
        k: params.k,
        distinct_patterns: firsts.len(),
        distinct_encodings: encodings.len(),
        case1,
        case2,
    })
}

/// Outcome of encoding and decoding every occurrence of size `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub occurrences: u64,
    pub failures: u64,
    /// Lexicographically first occurrence that failed to roundtrip.
    pub first_failure: Option<Vec<usize>>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub(crate) fn record(&mut self, idx: &[usize], ok: bool) {
        self.occurrences += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(idx.to_vec());
            }
        }
    }
}

/// Checks `decode(encode(T)) = pattern(T)` for every `k`-subset `T` of the host.
pub fn roundtrip_all(host: &Permutation, params: &EncodingParams, budget: u64) -> Result<RoundtripReport> {
    check_host(host, params)?;
    check_budget(params.n, params.k, budget)?;
    let mut report = RoundtripReport {
        occurrences: 0,
        failures: 0,
        first_failure: None,
    };
    for idx in (1..=params.n).combinations(params.k) {
        let occ = Occurrence::positional_unchecked(idx.clone());
        let expected = extract_pattern(host, &occ)?;
        let ok = encode_perm(host, &occ, params)
            .and_then(|enc| decode_perm(host, &enc, params))
            .is_ok_and(|pi| pi == expected);
        report.record(&idx, ok);
    }
    Ok(report)
}

/// Tally of Case 2 subsets grouped by their `(I, kept)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingLedger {
    pub n: usize,
    pub k: usize,
    pub case2_subsets: u64,
    /// Distinct `(I, kept)` pairs.
    pub pairs: usize,
    /// Pairs whose completion count is below `prod_{i in I} (b_i - 1)`.
    pub violations: usize,
    /// Pairs whose completion count equals the product exactly.
    pub exact: usize,
    /// Smallest product seen, compared against `(d n / k - 1)^{floor(ck)}`.
    pub min_product: u64,
    pub product_floor: f64,
}

impl CountingLedger {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.min_product as f64 >= self.product_floor
    }
}

/// For every size-`k` subset of `[n]` in Case 2, groups subsets by
/// `(I, kept)` and compares each group size with `prod_{i in I} (b_i - 1)`.
pub fn counting_ledger(params: &EncodingParams, budget: u64) -> Result<CountingLedger> {
    check_budget(params.n, params.k, budget)?;
    let mut groups: HashMap<(Vec<usize>, Vec<usize>), (u64, u64)> = HashMap::new();
    let mut case2_subsets = 0;
    for t in (1..=params.n).combinations(params.k) {
        let profile = profile_from(params.k, params, |j| t[j - 1]);
        let Some(selected) = select_indices(&profile, params) else {
            continue;
        };
        case2_subsets += 1;
        let product: u64 = selected.iter().map(|i| profile.widths[i] as u64 - 1).product();
        let kept = (1..=params.k)
            .filter(|i| selected.binary_search(i).is_err())
            .map(|i| t[i - 1])
            .collect();
        let entry = groups.entry((selected, kept)).or_insert((0, product));
        entry.0 += 1;
    }
    let violations = groups.values().filter(|(count, prod)| count < prod).count();
    let exact = groups.values().filter(|(count, prod)| count == prod).count();
    let min_product = groups.values().map(|&(_, p)| p).min().unwrap_or(0);
    let s = params.selected_count() as i32;
    Ok(CountingLedger {
        n: params.n,
        k: params.k,
        case2_subsets,
        pairs: groups.len(),
        violations,
        exact,
        min_product,
        product_floor: (params.threshold() - 1.0).max(0.0).powi(s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::count_distinct_patterns;
    use crate::random::random_permutation;
    use proptest::prelude::*;

    fn occ(v: &[usize]) -> Occurrence {
        Occurrence::positional(v.to_vec()).unwrap()
    }

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn width_examples() {
        let p = EncodingParams::new(0.2, 2.0, 12, 5).unwrap();
        let w = compute_widths(&occ(&[2, 5, 6, 9, 12]), &p).unwrap();
        assert_eq!(w.widths.into_iter().collect::<Vec<_>>(), vec![(2, 4), (4, 6)]);
        assert!((w.threshold - 4.8).abs() < 1e-12);
        assert_eq!(w.qualifying, vec![4]);
        let w = compute_widths(&occ(&[1, 2, 3, 4, 5]), &p).unwrap();
        assert_eq!(w.widths.values().copied().collect::<Vec<_>>(), vec![2, 2]);
        assert!(matches!(EncodingParams::new(0.2, 2.0, 12, 4), Err(Error::EvenPatternLength(4))));
        let p3 = EncodingParams::new(0.2, 2.0, 12, 3).unwrap();
        assert!(compute_widths(&occ(&[1, 2, 3, 4, 5]), &p3).is_err());
    }

    #[test]
    fn selection_examples() {
        let p = EncodingParams::new(0.2, 2.0, 30, 13).unwrap();
        assert_eq!(p.selected_count(), 2);
        let mut prof = WidthProfile {
            widths: BTreeMap::new(),
            threshold: 0.0,
            qualifying: vec![4, 8, 12],
        };
        assert_eq!(select_indices(&prof, &p), Some(vec![4, 8]));
        let p1 = EncodingParams::new(0.2, 2.0, 30, 5).unwrap();
        prof.qualifying = vec![4];
        assert_eq!(select_indices(&prof, &p1), Some(vec![4]));
        prof.qualifying = vec![];
        assert_eq!(select_indices(&prof, &p1), None);
        let defaults = EncodingParams::new(DEFAULT_C, DEFAULT_D, 30, 5).unwrap();
        assert_eq!(defaults.selected_count(), 0);
    }

    #[test]
    fn encode_examples() {
        let host = perm(&[5, 3, 8, 1, 12, 7, 10, 2, 6, 4, 11, 9]);
        let t = occ(&[1, 2, 3, 4, 9]);
        let pi = extract_pattern(&host, &t).unwrap();
        let p = EncodingParams::new(0.2, 2.0, 12, 5).unwrap();
        let enc = encode_perm(&host, &t, &p).unwrap();
        assert_eq!(
            enc,
            PermEncoding::Case2 {
                selected: vec![4],
                kept: vec![1, 2, 3, 9],
                relvals: vec![pi.at(4)],
            }
        );
        assert_eq!(decode_perm(&host, &enc, &p).unwrap(), pi);

        let p10 = EncodingParams::new(0.2, 10.0, 12, 5).unwrap();
        let enc = encode_perm(&host, &t, &p10).unwrap();
        assert_eq!(enc, PermEncoding::Case1 { indices: vec![1, 2, 3, 4, 9] });
        assert_eq!(decode_perm(&host, &enc, &p10).unwrap(), pi);

        let p15 = EncodingParams::new(0.4, 1.0, 15, 5).unwrap();
        let host15 = random_permutation(15, 3).unwrap();
        let enc = encode_perm(&host15, &occ(&[1, 2, 3, 4, 5]), &p15).unwrap();
        assert_eq!(enc.case(), 1);
    }

    #[test]
    fn monotone_host_decodes_increasing() {
        let host = Permutation::identity(20);
        let p = EncodingParams::new(0.4, 1.0, 20, 5).unwrap();
        let enc = encode_perm(&host, &occ(&[1, 6, 7, 12, 20]), &p).unwrap();
        assert_eq!(enc.case(), 2);
        assert_eq!(decode_perm(&host, &enc, &p).unwrap(), Permutation::identity(5));
    }

    #[test]
    fn malformed_encodings_rejected() {
        let host = Permutation::identity(20);
        let p = EncodingParams::new(0.4, 1.0, 20, 5).unwrap();
        let good = encode_perm(&host, &occ(&[1, 6, 7, 12, 20]), &p).unwrap();
        let PermEncoding::Case2 { selected, kept, relvals } = good.clone() else {
            panic!("expected case 2");
        };
        let bad = [
            PermEncoding::Case2 { selected: vec![2], kept: kept.clone(), relvals: relvals.clone() },
            PermEncoding::Case2 { selected: selected.clone(), kept: vec![1, 7, 6, 20], relvals: relvals.clone() },
            PermEncoding::Case2 { selected: selected.clone(), kept: kept.clone(), relvals: vec![2, 2] },
            PermEncoding::Case2 { selected: selected.clone(), kept: kept.clone(), relvals: vec![2, 9] },
            PermEncoding::Case2 { selected: vec![4, 2], kept: kept.clone(), relvals: relvals.clone() },
            PermEncoding::Case1 { indices: vec![1, 2, 3] },
        ];
        for enc in bad {
            assert!(
                matches!(decode_perm(&host, &enc, &p), Err(Error::MalformedEncoding(_))),
                "{enc:?}"
            );
        }
    }

    #[test]
    fn json_roundtrip() {
        let enc = PermEncoding::Case2 { selected: vec![4], kept: vec![1, 2, 3, 9], relvals: vec![2] };
        let s = serde_json::to_string(&enc).unwrap();
        assert_eq!(s, r#"{"case":2,"I":[4],"kept":[1,2,3,9],"relvals":[2]}"#);
        assert_eq!(serde_json::from_str::<PermEncoding>(&s).unwrap(), enc);
        let c1 = PermEncoding::Case1 { indices: vec![1, 2] };
        let s = serde_json::to_string(&c1).unwrap();
        assert_eq!(s, r#"{"case":1,"indices":[1,2]}"#);
        assert!(serde_json::from_str::<PermEncoding>(r#"{"case":1,"I":[2]}"#).is_err());
    }

    #[test]
    fn census_examples() {
        let host = perm(&[2, 4, 1, 3]);
        let p = EncodingParams::new(0.2, 10.0, 4, 3).unwrap();
        let c = census_encodings(&host, &p, CensusOptions::default()).unwrap();
        assert_eq!((c.distinct_patterns, c.distinct_encodings, c.case1), (4, 4, 4));
        let pi = perm(&[3, 1, 4, 5, 2]);
        let p = EncodingParams::new(0.4, 2.0, 5, 5).unwrap();
        let c = census_encodings(&pi, &p, CensusOptions::default()).unwrap();
        assert_eq!(c.distinct_encodings, 1);
        let host = random_permutation(20, 12).unwrap();
        let p = EncodingParams::new(0.4, 2.0, 20, 5).unwrap();
        let c = census_encodings(&host, &p, CensusOptions { parallelism: 4, ..Default::default() }).unwrap();
        let oracle = count_distinct_patterns(&host, 5, CensusOptions::default()).unwrap();
        assert_eq!(c.distinct_patterns, oracle.distinct_count as usize);
        assert!(c.injective());
        assert!(c.case2 > 0);
    }

    #[test]
    fn roundtrip_every_subset() {
        let host = random_permutation(11, 3).unwrap();
        let p = EncodingParams::new(0.4, 2.0, 11, 5).unwrap();
        let r = roundtrip_all(&host, &p, 1_000).unwrap();
        assert_eq!((r.occurrences, r.failures), (462, 0));
        assert!(roundtrip_all(&host, &p, 100).is_err());
    }

    #[test]
    fn ledger_small() {
        let p = EncodingParams::new(0.4, 2.0, 15, 5).unwrap();
        let l = counting_ledger(&p, 1_000_000).unwrap();
        assert!(l.case2_subsets > 0);
        assert!(l.holds());
        assert_eq!(l.exact, l.pairs);
    }

    fn subset_strategy() -> impl Strategy<Value = (u64, Vec<usize>)> {
        (any::<u64>(), proptest::sample::subsequence((1..=20usize).collect::<Vec<_>>(), 7))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn roundtrip_on_random_occurrences((seed, t) in subset_strategy(), c in 0.15f64..0.45, d in 0.5f64..3.0) {
            let host = random_permutation(20, seed).unwrap();
            let p = EncodingParams::new(c, d, 20, 7).unwrap();
            let o = Occurrence::positional(t).unwrap();
            let enc = encode_perm(&host, &o, &p).unwrap();
            prop_assert_eq!(decode_perm(&host, &enc, &p).unwrap(), extract_pattern(&host, &o).unwrap());
        }

        #[test]
        fn selection_ignores_even_entries((_seed, t) in subset_strategy(), shift in any::<u64>()) {
            let p = EncodingParams::new(0.3, 1.5, 20, 7).unwrap();
            let before = compute_widths(&Occurrence::positional(t.clone()).unwrap(), &p).unwrap();
            // move each even-indexed entry anywhere inside its gap
            let mut moved = t.clone();
            for i in (2..7).step_by(2) {
                let (lo, hi) = (t[i - 2], t[i]);
                moved[i - 1] = lo + 1 + (shift.rotate_left(i as u32 * 7) as usize) % (hi - lo - 1);
            }
            let after = compute_widths(&Occurrence::positional(moved).unwrap(), &p).unwrap();
            prop_assert_eq!(select_indices(&before, &p), select_indices(&after, &p));
            prop_assert_eq!(before, after);
        }
    }
}
