//! Exact rational scalars and their string form.
//!
//! Rationals serialize as `"numerator/denominator"` strings (the denominator
//! is always printed, `"3/1"` for the integer 3). Parsing also accepts plain
//! integers and finite decimals such as `"-0.25"`.

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out of f64 range: sign-correct infinity.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Natural log of a positive rational, accurate even when the value
/// over- or underflows `f64`.
pub fn ln_positive(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    let v = to_f64(r);
    if v.is_finite() && v > 1e-300 {
        return v.ln();
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = || Error::ParseRational(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['+', '-']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let n: BigInt = digits.parse().map_err(|_| err())?;
        let d = num::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Serde adapter for a single rational as a string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for an optional rational.
pub mod serde_opt_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| super::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for a vector of rationals.
pub mod serde_vec_str {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
