use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Lebesgue exponent stored by its reciprocal, so `p = ∞` is just `0.0`.
///
/// Every blow-up exponent in this crate is affine in the reciprocals, which
/// lets them be evaluated without special-casing infinity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(0.5);
    pub const INFINITY: Exponent = Exponent(0.0);

    /// From the reciprocal `1/p`, which must lie in `[0, 1]`.
    pub fn from_inv(inv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv) {
            return Err(Error::InvalidExponent(format!(
                "reciprocal {inv} is outside [0, 1]"
            )));
        }
        Ok(Exponent(inv))
    }

    /// From `p` itself; `p` must be in `[1, ∞]`.
    pub fn from_lebesgue(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(format!("p = {p} is below 1")));
        }
        if p.is_infinite() {
            return Ok(Exponent::INFINITY);
        }
        Ok(Exponent(1.0 / p))
    }

    #[inline]
    pub fn inv(self) -> f64 {
        self.0
    }

    /// `p`, with `f64::INFINITY` for the reciprocal `0`.
    pub fn lebesgue(self) -> f64 {
        if self.0 == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.0
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == 0.0
    }

    /// Conjugate exponent: `1/p' = 1 - 1/p`.
    pub fn dual(self) -> Exponent {
        Exponent(1.0 - self.0)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            _ => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidExponent(format!("cannot parse {t:?}")))?;
                Exponent::from_lebesgue(p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.lebesgue())
        }
    }
}

// Config files carry `p` itself: a number, or the string "inf".
impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.lebesgue())
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::from_lebesgue(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// A point `(1/p, 1/q)` of the closed unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentPair {
    pub p: Exponent,
    pub q: Exponent,
}

impl ExponentPair {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        ExponentPair { p, q }
    }

    pub fn from_inv(inv_p: f64, inv_q: f64) -> Result<Self> {
        Ok(ExponentPair {
            p: Exponent::from_inv(inv_p)?,
            q: Exponent::from_inv(inv_q)?,
        })
    }

    pub fn from_lebesgue(p: f64, q: f64) -> Result<Self> {
        Ok(ExponentPair {
            p: Exponent::from_lebesgue(p)?,
            q: Exponent::from_lebesgue(q)?,
        })
    }

    #[inline]
    pub fn inv_p(&self) -> f64 {
        self.p.inv()
    }

    #[inline]
    pub fn inv_q(&self) -> f64 {
        self.q.inv()
    }
}
