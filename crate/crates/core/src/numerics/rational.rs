//! Exact rational scalars and their text form.
//!
//! Rationals are written as `"a/b"` in lowest terms, or `"a"` when the
//! denominator is one. Parsing also accepts an unreduced fraction and
//! normalizes it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = |msg: &str| Error::format(format!("rational {text:?}"), msg);
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
            let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = text.parse().map_err(|_| bad("expected \"a\" or \"a/b\""))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub fn format_rational(value: &Rational) -> String {
    // `Ratio` displays as "a" when the denominator is one and "a/b" otherwise.
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `base^exp` for any integer exponent; `None` for `0^negative`.
pub fn pow(base: &Rational, exp: i32) -> Option<Rational> {
    if exp < 0 && base.is_zero() {
        return None;
    }
    Some(num_traits::Pow::pow(base, exp))
}

/// Returns `Some(n)` when `x` is an exact nonnegative integer small enough
/// to use as an exponent in exact arithmetic.
pub(crate) fn small_integer(x: f64) -> Option<i32> {
    if x.fract() == 0.0 && (0.0..=1024.0).contains(&x) {
        Some(x as i32)
    } else {
        None
    }
}

pub(crate) fn abs(value: &Rational) -> Rational {
    value.abs()
}

pub(crate) fn is_one(value: &Rational) -> bool {
    value.is_one()
}

/// A scalar that is exact whenever the computation allowed it.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Exact zero test on the rational path, `|x| <= tol` otherwise.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= tol,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&format_rational(r)),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

/// Serde adapter for a single rational stored as a string.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals stored as strings.
pub mod vec_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(
        values: &[Rational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let texts: Vec<String> = values.iter().map(format_rational).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts = Vec::<RationalText>::deserialize(d)?;
        texts
            .iter()
            .map(|t| t.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A rational as it appears in input files: canonically a string, but a
/// bare JSON integer is accepted too.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Integer(i64),
}

impl RationalText {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(s),
            RationalText::Integer(i) => Ok(integer(*i)),
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(value: &Rational) -> Self {
        RationalText::Text(format_rational(value))
    }
}
