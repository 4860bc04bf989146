//! Exact rational helpers: parsing, formatting and serde adapters.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, an integer, or a decimal literal with optional exponent
/// (`"-0.25"`, `"1.5e-3"`). Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a rational literal: {s:?}")))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut n: BigInt = format!("{whole}{frac}").parse().ok()?;
    if negative {
        n = -n;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Fixed-point rendering used by table output.
pub fn format_decimal(r: &Rational, places: usize) -> String {
    format!("{:.*}", places, to_f64(r))
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Serialises a [`Rational`] as its canonical string.
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let lit = RationalLiteral::deserialize(d)?;
        lit.to_rational().map_err(de::Error::custom)
    }
}

/// Serialises a `Vec<Rational>` as a list of canonical strings.
pub mod serde_vec {
    use super::*;
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<RationalLiteral>::deserialize(d)?
            .iter()
            .map(|l| l.to_rational().map_err(de::Error::custom))
            .collect()
    }
}

/// A rational as it appears in JSON: either a string (`"1/2"`, `"0.5"`) or
/// a plain number. Numbers go through their decimal text, so `0.1` is 1/10.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Text(String),
    Number(serde_json::Number),
}

impl RationalLiteral {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalLiteral::Text(s) => parse_rational(s),
            RationalLiteral::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

impl From<&Rational> for RationalLiteral {
    fn from(r: &Rational) -> Self {
        RationalLiteral::Text(format_rational(r))
    }
}
