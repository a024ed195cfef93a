//! Named numeric inequalities checked in high precision.
//!
//! Both sides of every inequality are positive, so they are carried as
//! logarithms. `margin_log = ln lhs - ln rhs`; a `LessEq` certificate holds
//! when the margin is `<= 0` and a `GreaterEq` one when it is `>= 0`.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::bounds::width_survival_real;
use super::real::Real;
use super::tinylog::TinyLog;
use crate::error::{Error, Result};

pub const CERTIFICATE_NAMES: [&str; 9] = [
    "thm1",
    "lam_binom",
    "lem31_chernoff",
    "lem31_binomial",
    "prop41",
    "thm2",
    "lem51_expected",
    "lem51_azuma",
    "lem52",
];

const MARGIN_DIGITS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LessEq,
    GreaterEq,
}

impl Direction {
    fn holds(self, margin: &Real) -> bool {
        match self {
            Direction::LessEq => !margin.is_positive(),
            Direction::GreaterEq => !margin.is_negative(),
        }
    }
}

/// One checked comparison `lhs (<= | >=) rhs`.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub label: String,
    pub direction: Direction,
    pub lhs: TinyLog,
    pub rhs: TinyLog,
    pub satisfied: bool,
    pub margin_log: Real,
}

impl Comparison {
    fn from_logs(label: &str, direction: Direction, lhs_log: Real, rhs_log: Real) -> Comparison {
        let margin_log = &lhs_log - &rhs_log;
        Comparison {
            label: label.to_string(),
            direction,
            satisfied: direction.holds(&margin_log),
            lhs: TinyLog::exp(lhs_log),
            rhs: TinyLog::exp(rhs_log),
            margin_log,
        }
    }

    fn lhs_log(&self) -> &Real {
        self.lhs.log_magnitude().expect("certificate sides are positive")
    }

    fn rhs_log(&self) -> &Real {
        self.rhs.log_magnitude().expect("certificate sides are positive")
    }
}

impl Serialize for Comparison {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Comparison", 6)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("direction", &self.direction)?;
        st.serialize_field("lhs_log", &self.lhs_log().to_sci_string(MARGIN_DIGITS))?;
        st.serialize_field("rhs_log", &self.rhs_log().to_sci_string(MARGIN_DIGITS))?;
        st.serialize_field("satisfied", &self.satisfied)?;
        st.serialize_field("margin_log", &self.margin_log.to_sci_string(MARGIN_DIGITS))?;
        st.end()
    }
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub name: String,
    /// Every parameter the certificate used, defaults included.
    pub params: BTreeMap<String, String>,
    pub main: Comparison,
    /// Further comparisons the inequality chain relies on.
    pub steps: Vec<Comparison>,
    /// The main comparison and every step hold.
    pub satisfied: bool,
}

impl Certificate {
    pub fn direction(&self) -> Direction {
        self.main.direction
    }

    pub fn lhs(&self) -> &TinyLog {
        &self.main.lhs
    }

    pub fn rhs(&self) -> &TinyLog {
        &self.main.rhs
    }

    pub fn margin_log(&self) -> &Real {
        &self.main.margin_log
    }

    pub fn step(&self, label: &str) -> Option<&Comparison> {
        self.steps.iter().find(|s| s.label == label)
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Certificate", 8)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("direction", &self.main.direction)?;
        st.serialize_field("lhs_log", &self.main.lhs_log().to_sci_string(MARGIN_DIGITS))?;
        st.serialize_field("rhs_log", &self.main.rhs_log().to_sci_string(MARGIN_DIGITS))?;
        st.serialize_field("satisfied", &self.satisfied)?;
        st.serialize_field("margin_log", &self.main.margin_log.to_sci_string(MARGIN_DIGITS))?;
        st.serialize_field("steps", &self.steps)?;
        st.end()
    }
}

/// Parameter table with defaults, overridable by name.
struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    fn new(defaults: &[(&str, &str)], overrides: &BTreeMap<String, String>) -> Result<Params> {
        let mut values: BTreeMap<String, String> = defaults
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        for (k, v) in overrides {
            match values.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => {
                    let known: Vec<_> = defaults.iter().map(|(k, _)| *k).collect();
                    return Err(Error::InvalidParameter(format!(
                        "unknown parameter '{k}' (expected one of: {})",
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(Params { values })
    }

    fn get(&self, key: &str) -> Result<Real> {
        let raw = &self.values[key];
        Real::parse(raw).map_err(|_| Error::InvalidParameter(format!("{key} = '{raw}' is not a number")))
    }

    fn positive(&self, key: &str) -> Result<Real> {
        let v = self.get(key)?;
        if !v.is_positive() {
            return Err(Error::InvalidParameter(format!("{key} must be > 0")));
        }
        Ok(v)
    }

    fn fraction(&self, key: &str) -> Result<Real> {
        let v = self.positive(key)?;
        if v >= Real::one() {
            return Err(Error::InvalidParameter(format!("{key} must lie in (0, 1)")));
        }
        Ok(v)
    }
}

fn ln(x: &Real) -> Real {
    x.ln().expect("argument checked positive")
}

fn r(v: i64) -> Real {
    Real::from_i64(v)
}

/// Checks the named inequality with default parameters replaced by `overrides`.
pub fn certify(name: &str, overrides: &BTreeMap<String, String>) -> Result<Certificate> {
    let (params, main, steps) = match name {
        "thm1" => thm1(overrides)?,
        "lam_binom" => lam_binom(overrides)?,
        "lem31_chernoff" => lem31_chernoff(overrides)?,
        "lem31_binomial" => lem31_binomial(overrides)?,
        "prop41" => prop41(overrides)?,
        "thm2" => thm2(overrides)?,
        "lem51_expected" => lem51_expected(overrides)?,
        "lem51_azuma" => lem51_azuma(overrides)?,
        "lem52" => lem52(overrides)?,
        other => return Err(Error::UnknownCertificate(other.to_string())),
    };
    let satisfied = main.satisfied && steps.iter().all(|s| s.satisfied);
    Ok(Certificate {
        name: name.to_string(),
        params: params.values,
        main,
        steps,
        satisfied,
    })
}

/// Every certificate at its defaults.
pub fn certify_all() -> Vec<Certificate> {
    let none = BTreeMap::new();
    CERTIFICATE_NAMES
        .iter()
        .map(|n| certify(n, &none).expect("defaults are well formed"))
        .collect()
}

type Parts = (Params, Comparison, Vec<Comparison>);

/// Per-k base of the Case 2 count: `rho^{1-c} e^c d^{-c} (1-c)^{-(1-c)} <= 1`,
/// where `rho` bounds `n / (k^2 / e^2)`.
fn thm1(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("c", "0.00075"), ("d", "8.180"), ("rho", "1.000076")], o)?;
    let c = p.fraction("c")?;
    let d = p.positive("d")?;
    let rho = p.positive("rho")?;
    let keep = &Real::one() - &c;
    let lhs = &(&(&keep * &ln(&rho)) + &c) - &(&(&c * &ln(&d)) + &(&keep * &ln(&keep)));
    let main = Comparison::from_logs("base below one", Direction::LessEq, lhs, Real::zero());
    Ok((p, main, vec![]))
}

/// `1 / lambda >= rho`, so `lambda^k (e n / k)^k <= (k / e)^k` when
/// `n < rho k^2 / e^2`.
fn lam_binom(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("lambda", "0.999924"), ("rho", "1.000076")], o)?;
    let lambda = p.fraction("lambda")?;
    let rho = p.positive("rho")?;
    let main = Comparison::from_logs("inverse above rho", Direction::GreaterEq, -ln(&lambda), ln(&rho));
    Ok((p, main, vec![]))
}

/// Per-unit Chernoff rate for the exponential sum at ratio `d / d'`.
fn lem31_chernoff(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("d", "8.180"), ("d_prime", "8.282"), ("lambda", "0.999924")], o)?;
    let d = p.positive("d")?;
    let d_prime = p.positive("d_prime")?;
    let lambda = p.fraction("lambda")?;
    let ratio = &d / &d_prime;
    let rate = &(&ratio - &Real::one()) - &ln(&ratio);
    let main = Comparison::from_logs("rate below lambda", Direction::LessEq, -rate, ln(&lambda));
    let order = Comparison::from_logs("d' exceeds d", Direction::GreaterEq, ln(&d_prime), ln(&d));
    Ok((p, main, vec![order]))
}

/// Per-k rate `exp(-(p/2 - c)^2 / p)` of the binomial lower tail with
/// `p = e^{-d''} (1 + d'')`.
fn lem31_binomial(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("c", "0.00075"), ("d_double_prime", "8.283"), ("lambda", "0.999924")], o)?;
    let c = p.fraction("c")?;
    let dpp = p.positive("d_double_prime")?;
    let lambda = p.fraction("lambda")?;
    let prob = width_survival_real(&dpp)?;
    let twice_c = &c * &r(2);
    let above = Comparison::from_logs("p exceeds 2c", Direction::GreaterEq, ln(&prob), ln(&twice_c));
    let gap = &prob.mul_pow2(-1) - &c;
    let exponent = &(&gap * &gap) / &prob;
    let mut main = Comparison::from_logs("rate below lambda", Direction::LessEq, -exponent, ln(&lambda));
    // a non-positive gap leaves no tail bound at all
    if !above.satisfied {
        main.satisfied = false;
    }
    Ok((p, main, vec![above]))
}

/// `ln(1 + e^{-s}) + e^{-s} <= e^{-t}`, with `s = slack_exp` and
/// `t = saving_exp`: the saving `exp(-e^{-t} k)` beats the slack
/// `(1 + e^{-s})^k` and still leaves `exp(-e^{-s} k)`.
fn prop41(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("slack_exp", "600"), ("saving_exp", "580")], o)?;
    let slack = (-p.positive("slack_exp")?).exp();
    let saving_log = -p.positive("saving_exp")?;
    let lhs = &slack.ln1p()? + &slack;
    let main = Comparison::from_logs("slack absorbed", Direction::LessEq, ln(&lhs), saving_log);
    Ok((p, main, vec![]))
}

/// Per-k log of `(k+t)^{k+t} / (k^k t^t)` with `t = tau k`, namely
/// `(1 + tau) ln(1 + tau) - tau ln tau`, against the saving `e^{-s}`.
fn thm2(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(&[("tau_exp", "1000"), ("saving_exp", "600")], o)?;
    let tau_log = -p.positive("tau_exp")?;
    let tau = tau_log.exp();
    let growth = &(&(&Real::one() + &tau) * &tau.ln1p()?) - &(&tau * &tau_log);
    let main = Comparison::from_logs(
        "alphabet growth below saving",
        Direction::LessEq,
        ln(&growth),
        -p.positive("saving_exp")?,
    );
    Ok((p, main, vec![]))
}

/// Worst case of `|J| exp(-2.6 (1 - c) k / |J|) >= a_m e^{-t}` over
/// `|J| >= j_frac a_m` and `a_m >= common_frac k`.
fn lem51_expected(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(
        &[
            ("c_exp", "290"),
            ("target_exp", "270"),
            ("j_frac", "0.1"),
            ("common_frac", "0.1"),
            ("rate", "2.6"),
            ("occupancy_cap", "0.9"),
        ],
        o,
    )?;
    let c = (-p.positive("c_exp")?).exp();
    let j_frac = p.fraction("j_frac")?;
    let common = p.fraction("common_frac")?;
    let rate = p.positive("rate")?;
    let cap = p.fraction("occupancy_cap")?;
    let keep = &Real::one() - &c;
    let rhs = &ln(&j_frac) - &(&(&rate * &keep) / &(&j_frac * &common));
    let main = Comparison::from_logs(
        "expected splits below a_m (1 - e^-t)",
        Direction::LessEq,
        -p.positive("target_exp")?,
        rhs,
    );
    // 1 - x >= exp(-rate x) on [0, cap] reduces to the endpoint by concavity
    let endpoint = Comparison::from_logs(
        "linear factor dominates exponential at the cap",
        Direction::LessEq,
        -(&rate * &cap),
        ln(&(&Real::one() - &cap)),
    );
    Ok((p, main, vec![endpoint]))
}

/// Azuma exponent `(a_m (e^{-u} - e^{-v}))^2 / (2 (1 - c) k) >= e^{-w} k` for
/// `a_m >= common_frac k`.
fn lem51_azuma(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(
        &[
            ("c_exp", "290"),
            ("mean_exp", "270"),
            ("tail_exp", "280"),
            ("target_exp", "560"),
            ("common_frac", "0.1"),
        ],
        o,
    )?;
    let c = (-p.positive("c_exp")?).exp();
    let common = p.fraction("common_frac")?;
    let mean_log = -p.positive("mean_exp")?;
    let tail_log = -p.positive("tail_exp")?;
    let order = Comparison::from_logs("mean gap below tail", Direction::GreaterEq, mean_log.clone(), tail_log.clone());
    let mut main = if order.satisfied && order.margin_log.is_positive() {
        let diff = TinyLog::exp(mean_log).sub(&TinyLog::exp(tail_log));
        let diff_log = diff.ln().expect("mean term is larger");
        let keep = &Real::one() - &c;
        let rhs = &(&(&ln(&common) * &r(2)) + &(&diff_log * &r(2))) - &ln(&(&keep * &r(2)));
        Comparison::from_logs("Azuma exponent above target", Direction::LessEq, -p.positive("target_exp")?, rhs)
    } else {
        Comparison::from_logs("Azuma exponent above target", Direction::LessEq, Real::zero(), Real::zero())
    };
    if !order.satisfied || !order.margin_log.is_positive() {
        main.satisfied = false;
    }
    Ok((p, main, vec![order]))
}

/// Rare-symbol count: `base = q^{f} / (1 - f)^{1 - f} <= ceiling` with
/// `q = common_frac` and `f = rare_frac`, followed by the comparison with
/// `exp(-e^{-s})` per unit of `k`.
fn lem52(o: &BTreeMap<String, String>) -> Result<Parts> {
    let p = Params::new(
        &[
            ("common_frac", "0.1"),
            ("rare_frac", "0.01"),
            ("ceiling", "0.988"),
            ("slack_exp", "600"),
        ],
        o,
    )?;
    let q = p.fraction("common_frac")?;
    let f = p.fraction("rare_frac")?;
    let ceiling = p.positive("ceiling")?;
    let slack = (-p.positive("slack_exp")?).exp();
    let rest = &Real::one() - &f;
    let base_log = &(&f * &ln(&q)) - &(&rest * &ln(&rest));
    let main = Comparison::from_logs("base below ceiling", Direction::LessEq, base_log.clone(), ln(&ceiling));
    let target = -slack.clone();
    // ceiling (1 + e^{-s}) <= exp(-e^{-s}), with n / (k^2 / e) < 1 + e^{-s}
    let fin = Comparison::from_logs(
        "ceiling against k!",
        Direction::LessEq,
        &ln(&ceiling) + &slack.ln1p()?,
        target.clone(),
    );
    // e * base * ((1 + e^{-s}) / e)^{1 - f} <= exp(-e^{-s}) bounds the chain
    // without replacing (n / k^2)^{1 - f} by n / k^2
    let direct = &(&Real::one() + &base_log) + &(&rest * &(&slack.ln1p()? - &Real::one()));
    let chain = Comparison::from_logs("direct chain against k!", Direction::LessEq, direct, target);
    Ok((p, main, vec![fin, chain]))
}
