//! Tail bounds and counting bounds.

use num_bigint::BigUint;
use serde::Serialize;

use super::real::Real;
use super::tinylog::TinyLog;
use crate::error::{Error, Result};
use crate::util::{binomial, factorial_big};

/// `P(Gamma(2, 1) >= d) = e^{-d} (1 + d)`.
pub fn width_survival(d: f64) -> Result<f64> {
    if d.is_nan() || d < 0.0 || d.is_infinite() {
        return Err(Error::InvalidParameter(format!("d must be finite and >= 0, got {d}")));
    }
    Ok((-d).exp() * (1.0 + d))
}

/// Same as [`width_survival`] in high precision.
pub fn width_survival_real(d: &Real) -> Result<Real> {
    if d.is_negative() {
        return Err(Error::InvalidParameter(format!("d must be >= 0, got {d}")));
    }
    Ok(&(-d).exp() * &(&Real::one() + d))
}

/// CDF of `Gamma(2, 1)`, zero for negative arguments.
pub fn gamma2_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x).exp_m1() - x * (-x).exp()
    }
}

/// `rho - 1 - ln rho`, the large-deviation rate for a mean-1 exponential sum
/// at ratio `rho`.
fn exp_sum_rate(ratio: &Real) -> Result<Real> {
    if !ratio.is_positive() {
        return Err(Error::InvalidParameter(format!("ratio must be > 0, got {ratio}")));
    }
    Ok(&(ratio - &Real::one()) - &ratio.ln()?)
}

/// `exp(-(k + 1) (rho - 1 - ln rho))`.
pub fn chernoff_exp_sum(k: u64, ratio: &Real) -> Result<TinyLog> {
    let rate = exp_sum_rate(ratio)?;
    Ok(TinyLog::exp(-(&rate * &Real::from_u64(k + 1))))
}

/// `exp(-(rho - 1 - ln rho))`, the bound per summand.
pub fn chernoff_rate(ratio: &Real) -> Result<TinyLog> {
    Ok(TinyLog::exp(-exp_sum_rate(ratio)?))
}

/// Lower-tail bound `P(Bin(trials, p) <= threshold) <= exp(-(mu - threshold)^2 / (2 mu))`
/// with `mu = trials * p`.
pub fn binomial_tail(trials: &Real, p: &Real, threshold: &Real) -> Result<TinyLog> {
    if !p.is_positive() || p > &Real::one() {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    if !trials.is_positive() {
        return Err(Error::InvalidParameter(format!("trials must be > 0, got {trials}")));
    }
    let mean = trials * p;
    if threshold >= &mean {
        return Err(Error::VacuousBound(format!(
            "threshold {threshold} is not below the mean {mean}"
        )));
    }
    let gap = &mean - threshold;
    let exponent = &(&gap * &gap) / &(&mean * &Real::from_i64(2));
    Ok(TinyLog::exp(-exponent))
}

/// `a_m - j * exp(-2.6 * prefix_len / j)`: the bound on the expected number of
/// splits of a symbol with `a_m` occurrences, `j` of whose gaps are not full.
pub fn expected_splits_bound(a_m: f64, j: f64, prefix_len: f64) -> Result<f64> {
    if j.is_nan() || j <= 0.0 {
        return Err(Error::InvalidParameter(format!("j must be > 0, got {j}")));
    }
    Ok(a_m - j * (-2.6 * prefix_len / j).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceBound {
    pub r: usize,
    /// `ln(C(r, k) (n / k)^k)`.
    pub lhs_log: f64,
    /// `ln k!`.
    pub rhs_log: f64,
    /// `C(r, k) n^k >= k! k^k`, decided exactly.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialBounds {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "as_decimal")]
    pub binom_n_k: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub k_factorial: BigUint,
    /// `C(n, k) >= k!`, necessary for a `k`-superpattern of length `n`.
    pub permutation_condition: bool,
    pub sequence: Option<SequenceBound>,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(v).expect("fits in f64").ln();
    }
    let shift = bits - 900;
    let top: BigUint = v >> shift;
    num_traits::ToPrimitive::to_f64(&top).expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Necessary conditions for universality obtained by counting subsequences.
pub fn trivial_bounds(n: usize, k: usize, r: Option<usize>) -> Result<TrivialBounds> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let binom_n_k = binomial(n as u64, k as u64);
    let k_factorial = factorial_big(k as u64);
    let sequence = r
        .map(|r| {
            if k > r {
                return Err(Error::SubsetTooLarge { n: r, k });
            }
            let choose = binomial(r as u64, k as u64);
            let lhs = &choose * BigUint::from(n).pow(k as u32);
            let rhs = &k_factorial * BigUint::from(k).pow(k as u32);
            let kf = k as f64;
            Ok(SequenceBound {
                r,
                lhs_log: ln_big(&choose) + kf * (n as f64 / kf).ln(),
                rhs_log: ln_big(&k_factorial),
                holds: lhs >= rhs,
            })
        })
        .transpose()?;
    Ok(TrivialBounds {
        n,
        k,
        permutation_condition: binom_n_k >= k_factorial,
        binom_n_k,
        k_factorial,
        sequence,
    })
}
