//! Signed numbers stored as `sign * exp(log_mag)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::real::Real;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TinyLog {
    sign: i8,
    /// `ln |x|`; meaningless (kept at 0) when `sign == 0`.
    log_mag: Real,
}

impl TinyLog {
    pub fn zero() -> TinyLog {
        TinyLog {
            sign: 0,
            log_mag: Real::zero(),
        }
    }

    pub fn one() -> TinyLog {
        TinyLog::exp(Real::zero())
    }

    /// `e^x`.
    pub fn exp(x: Real) -> TinyLog {
        TinyLog {
            sign: 1,
            log_mag: x,
        }
    }

    pub fn from_real(x: &Real) -> TinyLog {
        match x.signum() {
            0 => TinyLog::zero(),
            s => TinyLog {
                sign: s,
                log_mag: x.abs().ln().expect("nonzero magnitude"),
            },
        }
    }

    pub fn parse(s: &str) -> Result<TinyLog> {
        Ok(TinyLog::from_real(&Real::parse(s)?))
    }

    pub fn from_u64(v: u64) -> TinyLog {
        TinyLog::from_real(&Real::from_u64(v))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// `ln |x|`; `None` for zero.
    pub fn log_magnitude(&self) -> Option<&Real> {
        (self.sign != 0).then_some(&self.log_mag)
    }

    /// `ln x` for positive values.
    pub fn ln(&self) -> Result<Real> {
        if self.sign != 1 {
            return Err(Error::InvalidParameter(
                "logarithm of a non-positive TinyLog".into(),
            ));
        }
        Ok(self.log_mag.clone())
    }

    pub fn abs(&self) -> TinyLog {
        TinyLog {
            sign: self.sign.abs(),
            log_mag: self.log_mag.clone(),
        }
    }

    pub fn neg(&self) -> TinyLog {
        TinyLog {
            sign: -self.sign,
            log_mag: self.log_mag.clone(),
        }
    }

    pub fn mul(&self, other: &TinyLog) -> TinyLog {
        if self.sign == 0 || other.sign == 0 {
            return TinyLog::zero();
        }
        TinyLog {
            sign: self.sign * other.sign,
            log_mag: &self.log_mag + &other.log_mag,
        }
    }

    pub fn div(&self, other: &TinyLog) -> Result<TinyLog> {
        if other.sign == 0 {
            return Err(Error::InvalidParameter("division by zero".into()));
        }
        if self.sign == 0 {
            return Ok(TinyLog::zero());
        }
        Ok(TinyLog {
            sign: self.sign * other.sign,
            log_mag: &self.log_mag - &other.log_mag,
        })
    }

    /// `x^y` for positive `x` and real `y`.
    pub fn pow(&self, y: &Real) -> Result<TinyLog> {
        if self.sign != 1 {
            return Err(Error::InvalidParameter(
                "real power of a non-positive TinyLog".into(),
            ));
        }
        Ok(TinyLog::exp(&self.log_mag * y))
    }

    pub fn powi(&self, n: i64) -> TinyLog {
        if n == 0 {
            return TinyLog::one();
        }
        if self.sign == 0 {
            return TinyLog::zero();
        }
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        TinyLog {
            sign,
            log_mag: &self.log_mag * &Real::from_i64(n),
        }
    }

    /// Signed log-sum-exp.
    pub fn add(&self, other: &TinyLog) -> TinyLog {
        if self.sign == 0 {
            return other.clone();
        }
        if other.sign == 0 {
            return self.clone();
        }
        let (big, small) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        let d = &small.log_mag - &big.log_mag;
        let ratio = d.exp();
        if big.sign == small.sign {
            TinyLog {
                sign: big.sign,
                log_mag: &big.log_mag + &ratio.ln1p().expect("ratio is positive"),
            }
        } else if d.is_zero() {
            TinyLog::zero()
        } else {
            // 1 - e^d with d < 0, computed as -expm1(d) to keep tiny gaps
            let gap = -d.expm1();
            TinyLog {
                sign: big.sign,
                log_mag: &big.log_mag + &gap.ln().expect("gap is positive"),
            }
        }
    }

    pub fn sub(&self, other: &TinyLog) -> TinyLog {
        self.add(&other.neg())
    }

    /// `ln(1 + x)` for `x > -1`.
    pub fn ln1p(&self) -> Result<Real> {
        self.to_real().ln1p()
    }

    pub fn to_real(&self) -> Real {
        match self.sign {
            0 => Real::zero(),
            1 => self.log_mag.exp(),
            _ => -self.log_mag.exp(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.to_f64().exp(),
        }
    }
}

impl PartialEq for TinyLog {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TinyLog {}

impl PartialOrd for TinyLog {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TinyLog {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.log_mag.cmp(&other.log_mag),
                _ => other.log_mag.cmp(&self.log_mag),
            },
            o => o,
        }
    }
}

impl fmt::Display for TinyLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => f.write_str("0"),
            s => write!(
                f,
                "{}exp({})",
                if s < 0 { "-" } else { "" },
                self.log_mag.to_sci_string(f.precision().unwrap_or(34))
            ),
        }
    }
}

impl Serialize for TinyLog {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
