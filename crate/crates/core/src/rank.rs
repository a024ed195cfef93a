//! Factorial-number-system (Lehmer) ranking of patterns of length up to 20.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest pattern length whose `k!` fits in a `u64`.
pub const MAX_RANKED_LEN: usize = 20;

pub(crate) const FACTORIALS: [u64; MAX_RANKED_LEN + 1] = {
    let mut f = [1u64; MAX_RANKED_LEN + 1];
    let mut i = 1;
    while i <= MAX_RANKED_LEN {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

/// Rank of a pattern in Lehmer order; `rank < k!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternRank(pub u64);

pub fn factorial(k: usize) -> Result<u64> {
    FACTORIALS.get(k).copied().ok_or(Error::Capacity {
        k,
        max: MAX_RANKED_LEN,
    })
}

pub fn rank_pattern(p: &Permutation) -> Result<PatternRank> {
    let k = p.len();
    if k > MAX_RANKED_LEN {
        return Err(Error::Capacity {
            k,
            max: MAX_RANKED_LEN,
        });
    }
    let v = p.as_slice();
    let mut rank = 0u64;
    for i in 0..k {
        let smaller_after = v[i + 1..].iter().filter(|&&x| x < v[i]).count() as u64;
        rank += smaller_after * FACTORIALS[k - 1 - i];
    }
    Ok(PatternRank(rank))
}

pub fn unrank_pattern(rank: PatternRank, k: usize) -> Result<Permutation> {
    if k > MAX_RANKED_LEN {
        return Err(Error::Capacity {
            k,
            max: MAX_RANKED_LEN,
        });
    }
    if k == 0 || rank.0 >= FACTORIALS[k] {
        return Err(Error::InvalidParameter(format!(
            "rank {} out of range for k = {k}",
            rank.0
        )));
    }
    let mut remaining: Vec<u32> = (1..=k as u32).collect();
    let mut r = rank.0;
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let f = FACTORIALS[k - 1 - i];
        let digit = (r / f) as usize;
        r %= f;
        out.push(remaining.remove(digit));
    }
    Ok(Permutation::from_vec_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(rank_pattern(&perm(&[1, 2, 3])).unwrap(), PatternRank(0));
        assert_eq!(rank_pattern(&perm(&[3, 2, 1])).unwrap(), PatternRank(5));
        assert_eq!(rank_pattern(&perm(&[2, 1, 3])).unwrap(), PatternRank(2));
    }

    #[test]
    fn lehmer_order_matches_lexicographic_enumeration() {
        // lexicographic order of S_k is the Lehmer order
        for k in 1..=7u32 {
            for (i, p) in (1..=k).permutations(k as usize).enumerate() {
                let p = Permutation::new(p).unwrap();
                let r = rank_pattern(&p).unwrap();
                assert_eq!(r, PatternRank(i as u64));
                assert_eq!(unrank_pattern(r, k as usize).unwrap(), p);
            }
        }
    }

    #[test]
    fn capacity() {
        let big = Permutation::identity(21);
        assert!(matches!(rank_pattern(&big), Err(Error::Capacity { k: 21, .. })));
        assert!(unrank_pattern(PatternRank(0), 21).is_err());
        assert!(unrank_pattern(PatternRank(6), 3).is_err());
        let top = unrank_pattern(PatternRank(FACTORIALS[20] - 1), 20).unwrap();
        assert_eq!(top.as_slice()[0], 20);
    }
}
