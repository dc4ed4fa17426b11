//! Exact rationals and their text/JSON encodings.
//!
//! Values are `Ratio<i128>`. On the wire a rational is written as
//! `{"num": .., "den": ..}`; on input integers, decimal literals, decimal
//! strings and `"a/b"` strings are also accepted and parsed exactly.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

pub fn frac(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators (1 for an empty input).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i128 {
    values.into_iter().fold(1i128, |acc, v| acc.lcm(v.denom()))
}

/// Returns the value as an integer if it has no fractional part.
pub fn as_integer(r: &Rational) -> Option<i128> {
    r.is_integer().then(|| r.to_integer())
}

/// Parses `"7"`, `"-3/4"`, `"0.125"`, `"-2.50"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(whole) || !digits_ok(fraction) || fraction.len() > 30 {
        return Err(bad());
    }
    let mut num: i128 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| bad())?
    };
    let mut den: i128 = 1;
    for c in fraction.chars() {
        let d = c.to_digit(10).unwrap() as i128;
        num = num
            .checked_mul(10)
            .and_then(|v| v.checked_add(d))
            .ok_or_else(bad)?;
        den = den.checked_mul(10).ok_or_else(bad)?;
    }
    let r = Rational::new(num, den);
    Ok(if negative { -r } else { r })
}

/// Compact human form: `3`, `-1/2`.
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

/// Serde adapter so a plain `Rational` field can be written `#[serde(with = "exact")]`.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        Exact(*r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Exact::deserialize(d).map(|e| e.0)
    }
}

/// Newtype carrying the wire encoding of a rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("den", self.0.denom())?;
        st.serialize_field("num", self.0.numer())?;
        st.end()
    }
}

struct ExactVisitor;

impl<'de> Visitor<'de> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational: integer, decimal, \"a/b\" string or {num, den} object")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
        Ok(Exact(int(v as i128)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
        Ok(Exact(int(v as i128)))
    }

    fn visit_i128<E: de::Error>(self, v: i128) -> std::result::Result<Exact, E> {
        Ok(Exact(int(v)))
    }

    fn visit_u128<E: de::Error>(self, v: u128) -> std::result::Result<Exact, E> {
        i128::try_from(v)
            .map(|v| Exact(int(v)))
            .map_err(|_| E::custom("integer out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exact, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        // Display for f64 prints the shortest round-tripping decimal, never an exponent.
        parse_rational(&format!("{v}"))
            .map(Exact)
            .map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
        parse_rational(v).map(Exact).map_err(E::custom)
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Exact, A::Error> {
        // values go through Exact again since buffered formats cannot carry i128
        let integer = |e: Exact| {
            as_integer(&e.0).ok_or_else(|| de::Error::custom("num and den must be integers"))
        };
        let mut num: Option<i128> = None;
        let mut den: Option<i128> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "num" => num = Some(integer(map.next_value()?)?),
                "den" => den = Some(integer(map.next_value()?)?),
                other => return Err(de::Error::unknown_field(other, &["num", "den"])),
            }
        }
        let num = num.ok_or_else(|| de::Error::missing_field("num"))?;
        let den = den.unwrap_or(1);
        if den.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Exact(Rational::new(num, den)))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Exact, D::Error> {
        d.deserialize_any(ExactVisitor)
    }
}

pub fn unwrap_all(values: &[Exact]) -> Vec<Rational> {
    values.iter().map(|e| e.0).collect()
}

pub fn wrap_all(values: &[Rational]) -> Vec<Exact> {
    values.iter().copied().map(Exact).collect()
}
