//! Host objects and patterns: permutations, r-ary sequences, occurrences.
//!
//! All indices and values are 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1..n}`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::NotAPermutation {
                n,
                reason: "empty".into(),
            });
        }
        let mut seen = vec![false; n];
        for &v in &values {
            if v == 0 || v as usize > n {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} out of range"),
                });
            }
            if std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} repeats"),
                });
            }
        }
        Ok(Permutation(values))
    }

    /// Caller guarantees `values` is a bijection on `1..=len`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation(values)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// `self(i)` for a 1-based position.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (pos, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = pos as u32 + 1;
        }
        Permutation(inv)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<u32>::deserialize(d)?;
        Permutation::new(values).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

/// A sequence in `[r]^n`. Symbols of the alphabet may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RarySequence {
    values: Vec<u32>,
    r: u32,
}

impl RarySequence {
    pub fn new(values: Vec<u32>, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("alphabet size r must be >= 1".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| v == 0 || v > r) {
            return Err(Error::ValueOutOfRange { value: v as i64, r });
        }
        Ok(RarySequence { values, r })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn alphabet_size(&self) -> u32 {
        self.r
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    pub fn at(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    /// Positions (1-based, increasing) at which `symbol` occurs.
    pub fn positions_of(&self, symbol: u32) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == symbol)
            .map(|(p, _)| p + 1)
            .collect()
    }

    /// Positions of every symbol, indexed by `symbol - 1`.
    pub fn positions_by_symbol(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.r as usize];
        for (p, &v) in self.values.iter().enumerate() {
            out[v as usize - 1].push(p + 1);
        }
        out
    }

    /// Keeps only the symbols in `symbols` and relabels them `1..=|symbols|`
    /// in increasing order. This is the subsequence `σ_Y` over the alphabet `Y`.
    pub fn restrict_to_symbols(&self, symbols: &[u32]) -> Result<RarySequence> {
        let mut ys = symbols.to_vec();
        ys.sort_unstable();
        ys.dedup();
        if ys.len() != symbols.len() {
            return Err(Error::InvalidParameter("symbol subset has repeats".into()));
        }
        if let Some(&bad) = ys.iter().find(|&&y| y == 0 || y > self.r) {
            return Err(Error::ValueOutOfRange {
                value: bad as i64,
                r: self.r,
            });
        }
        let mut relabel = vec![0u32; self.r as usize + 1];
        for (rank, &y) in ys.iter().enumerate() {
            relabel[y as usize] = rank as u32 + 1;
        }
        let values = self
            .values
            .iter()
            .filter_map(|&v| (relabel[v as usize] != 0).then_some(relabel[v as usize]))
            .collect();
        RarySequence::new(values, ys.len().max(1) as u32)
    }
}

impl fmt::Display for RarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.values)
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, values: &[u32]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Anything a pattern can be searched for in.
pub trait Host: Sync {
    fn entries(&self) -> &[u32];

    /// True when no two entries can be equal (permutation hosts).
    fn entries_distinct(&self) -> bool;

    fn host_len(&self) -> usize {
        self.entries().len()
    }
}

impl Host for Permutation {
    fn entries(&self) -> &[u32] {
        &self.0
    }

    fn entries_distinct(&self) -> bool {
        true
    }
}

impl Host for RarySequence {
    fn entries(&self) -> &[u32] {
        &self.values
    }

    fn entries_distinct(&self) -> bool {
        false
    }
}

/// Either kind of host, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyHost {
    Perm(Permutation),
    Seq(RarySequence),
}

impl Host for AnyHost {
    fn entries(&self) -> &[u32] {
        match self {
            AnyHost::Perm(p) => p.entries(),
            AnyHost::Seq(s) => s.entries(),
        }
    }

    fn entries_distinct(&self) -> bool {
        matches!(self, AnyHost::Perm(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OccurrenceMode {
    /// `t_1 < ... < t_k`.
    PositionOrdered,
    /// `t_i` is the position of the entry playing value `i`.
    ValueIndexed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    indices: Vec<usize>,
    mode: OccurrenceMode,
}

impl Occurrence {
    pub fn positional(indices: Vec<usize>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidOccurrence("indices are 1-based".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidOccurrence(
                "position-ordered indices must be strictly increasing".into(),
            ));
        }
        Ok(Occurrence {
            indices,
            mode: OccurrenceMode::PositionOrdered,
        })
    }

    pub fn value_indexed(indices: Vec<usize>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidOccurrence("indices are 1-based".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidOccurrence("indices must be distinct".into()));
        }
        Ok(Occurrence {
            indices,
            mode: OccurrenceMode::ValueIndexed,
        })
    }

    pub(crate) fn positional_unchecked(indices: Vec<usize>) -> Self {
        Occurrence {
            indices,
            mode: OccurrenceMode::PositionOrdered,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mode(&self) -> OccurrenceMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Indices in increasing position order.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        if self.mode == OccurrenceMode::ValueIndexed {
            v.sort_unstable();
        }
        v
    }
}

/// The unique permutation order-isomorphic to `values`.
pub fn standardize<T>(values: &[T]) -> Result<Permutation>
where
    T: Ord + Copy + Into<i64>,
{
    if values.is_empty() {
        return Err(Error::NotAPermutation {
            n: 0,
            reason: "empty".into(),
        });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| values[i]);
    let mut out = vec![0u32; values.len()];
    for (rank, w) in order.iter().enumerate() {
        if rank > 0 && values[order[rank - 1]] == values[*w] {
            return Err(Error::DuplicateValues(values[*w].into()));
        }
        out[*w] = rank as u32 + 1;
    }
    Ok(Permutation(out))
}

/// The pattern formed by the host entries selected by `occ`.
pub fn extract_pattern<H: Host + ?Sized>(host: &H, occ: &Occurrence) -> Result<Permutation> {
    let entries = host.entries();
    let n = entries.len();
    let positions = occ.sorted_indices();
    if let Some(&bad) = positions.iter().find(|&&t| t == 0 || t > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let selected: Vec<u32> = positions.iter().map(|&t| entries[t - 1]).collect();
    standardize(&selected).map_err(|e| match e {
        Error::DuplicateValues(v) => Error::RepeatedSymbol { symbol: v as u32 },
        other => other,
    })
}

/// A permutation with the same relative order as `seq`; ties within a
/// symbol go to the earlier position.
pub fn lift(seq: &RarySequence) -> Permutation {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    // stable sort keeps positional order among equal symbols
    order.sort_by_key(|&i| seq.values[i]);
    let mut out = vec![0u32; seq.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    Permutation(out)
}
