//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n/d` as a big rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Denominator as u64; all exponent grains in scope are tiny.
pub(crate) fn denom_u64(x: &Rational) -> u64 {
    x.denom().to_u64().expect("denominator exceeds u64")
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `x * g` as an i64 if it is an integer.
pub(crate) fn to_units(x: &Rational, grain: u64) -> Option<i64> {
    let scaled = x * Rational::from_integer(BigInt::from(grain));
    if scaled.is_integer() {
        scaled.to_integer().to_i64()
    } else {
        None
    }
}

pub(crate) fn from_units(units: i64, grain: u64) -> Rational {
    Rational::new(BigInt::from(units), BigInt::from(grain))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Formats `p/q` or `p` for integers.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, `p`, or a decimal-free integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Serde adapters: rationals travel as `[num, den]` integer pairs.
pub mod serde_pair {
    use super::Rational;
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn to_value(x: &BigInt) -> serde_json::Value {
        match i64::try_from(x) {
            Ok(v) => serde_json::Value::from(v),
            Err(_) => serde_json::Value::from(x.to_string()),
        }
    }

    fn from_value<E: serde::de::Error>(v: &serde_json::Value) -> Result<BigInt, E> {
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| E::custom("rational component must be an integer")),
            serde_json::Value::String(s) => s.parse().map_err(E::custom),
            _ => Err(E::custom("rational component must be an integer or decimal string")),
        }
    }

    pub fn to_pair(x: &Rational) -> [serde_json::Value; 2] {
        [to_value(x.numer()), to_value(x.denom())]
    }

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_pair(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let [n, q] = <[serde_json::Value; 2]>::deserialize(d)?;
        let n = from_value::<D::Error>(&n)?;
        let q = from_value::<D::Error>(&q)?;
        if q == BigInt::from(0) {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(n, q))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            xs.iter().map(to_pair).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<[serde_json::Value; 2]>::deserialize(d)?;
            raw.iter()
                .map(|[n, q]| {
                    let n = from_value::<D::Error>(n)?;
                    let q = from_value::<D::Error>(q)?;
                    if q == BigInt::from(0) {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    Ok(Rational::new(n, q))
                })
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            x.as_ref().map(to_pair).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Rational>, D::Error> {
            let raw = Option::<[serde_json::Value; 2]>::deserialize(d)?;
            raw.map(|[n, q]| {
                let n = from_value::<D::Error>(&n)?;
                let q = from_value::<D::Error>(&q)?;
                if q == BigInt::from(0) {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(Rational::new(n, q))
            })
            .transpose()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            x: &Option<Vec<Rational>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            x.as_ref()
                .map(|v| v.iter().map(to_pair).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Rational>>, D::Error> {
            let raw = Option::<Vec<[serde_json::Value; 2]>>::deserialize(d)?;
            raw.map(|v| {
                v.iter()
                    .map(|[n, q]| {
                        let n = from_value::<D::Error>(n)?;
                        let q = from_value::<D::Error>(q)?;
                        if q == BigInt::from(0) {
                            return Err(D::Error::custom("zero denominator"));
                        }
                        Ok(Rational::new(n, q))
                    })
                    .collect()
            })
            .transpose()
        }
    }
}
