//! Exact rational helpers.
//!
//! All probabilities in the engine are [`BigRational`]s. In every file format
//! they travel as strings, `"p/q"` or `"k"` for integers, so no floating point
//! value ever enters the computation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(k: i64) -> Rational {
    BigRational::from_integer(BigInt::from(k))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"-p/q"` or `"k"`. Whitespace around the parts is allowed.
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text form: lowest terms, `k` for integers.
pub fn format(value: &Rational) -> String {
    // Ratio's Display already reduces and drops a unit denominator.
    value.to_string()
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

/// Serde adapter: rationals as canonical strings.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

pub mod opt_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format(v)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse(" 7 / 8 ").unwrap(), rat(7, 8));
        assert_eq!(parse("-1/3").unwrap(), rat(-1, 3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "a/b", "1/-2", "0.5", "1//2", "/3"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format(&rat(6, 8)), "3/4");
        assert_eq!(format(&rat(8, 8)), "1");
        assert_eq!(format(&zero()), "0");
    }
}
