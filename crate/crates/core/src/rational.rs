//! Helpers for exact rationals: `"p/q"` text form, conversion for reporting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Int, Rational};

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {text:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {text:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Always `"p/q"`, including integers (`"1/1"`).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn parse_int(text: &str) -> Result<Int, Error> {
    text.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {text:?}")))
}

/// Nearest `f64`; exact rationals too large for `f64` saturate to ±∞.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 only fails on absurd magnitudes; fall back to a
        // quotient of logs.
        let sign = if value.is_negative() { -1.0 } else { 1.0 };
        let n = value.numer().abs().bits() as f64;
        let d = value.denom().bits() as f64;
        sign * 2f64.powf(n - d)
    })
}

/// `⌈x⌉` for an exact rational.
pub fn ceil(value: &Rational) -> Int {
    let (q, r) = value.numer().div_mod_floor(value.denom());
    if r.is_zero() {
        q
    } else {
        q + BigInt::one()
    }
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: big integers as decimal strings (plain JSON integers are
/// accepted on input).
pub mod serde_int {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Int;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum IntRepr {
        Text(String),
        Number(i64),
    }

    pub fn serialize<S: Serializer>(value: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        match IntRepr::deserialize(d)? {
            IntRepr::Text(text) => super::parse_int(&text).map_err(serde::de::Error::custom),
            IntRepr::Number(n) => Ok(Int::from(n)),
        }
    }
}
