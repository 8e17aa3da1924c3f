//! Helpers around `BigRational`: parsing, wire format, float conversion.
//!
//! Exact values travel as `["num","den"]` pairs of decimal strings so that
//! nothing is lost to 64-bit overflow.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Parses `"3"`, `"-3/4"` or `"  7 / 2 "`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Invalid(format!("bad rational numerator `{num}`")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Invalid(format!("bad rational denominator `{den}`")))?;
    if den.is_zero() {
        return Err(Error::Invalid(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

pub fn to_wire(q: &Rational) -> [String; 2] {
    [q.numer().to_string(), q.denom().to_string()]
}

pub fn display(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Natural log of |n|, valid for integers of any size. Returns `-inf` for zero.
pub fn ln_abs(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Conversion that stays finite for huge numerators and denominators.
pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let sign = if q.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * (ln_abs(q.numer()) - ln_abs(q.denom())).exp()
}

/// Number of decimal digits of |n| (upper estimate from the bit length).
pub fn decimal_digits(n: &BigInt) -> u64 {
    if n.is_zero() {
        return 1;
    }
    ((n.bits() as f64) * std::f64::consts::LOG10_2).floor() as u64 + 1
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn gcd_of<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Scales a rational vector to the primitive integer vector pointing the same way.
/// Zero vectors stay zero.
pub fn primitive_direction(v: &[Rational]) -> Vec<BigInt> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = gcd_of(&ints);
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Serde adapter accepting `["num","den"]`, `"num/den"`, or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireRational(pub Rational);

impl Serialize for WireRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_wire(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WireRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([String; 2]),
            Text(String),
            Int(i64),
        }
        let q = match Raw::deserialize(d)? {
            Raw::Pair([n, den]) => parse_rational(&format!("{n}/{den}")),
            Raw::Text(t) => parse_rational(&t),
            Raw::Int(i) => Ok(rat(i)),
        };
        q.map(WireRational).map_err(de::Error::custom)
    }
}

pub fn wire_vec(v: &[Rational]) -> Vec<[String; 2]> {
    v.iter().map(to_wire).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ln_of_huge_integer() {
        let n = BigInt::from(3).pow(5000);
        let expect = 5000.0 * 3f64.ln();
        assert!((ln_abs(&n) - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn wire_round_trip() {
        let w: WireRational = serde_json::from_str(r#"["-3","9"]"#).unwrap();
        assert_eq!(w.0, ratio(-1, 3));
        let w: WireRational = serde_json::from_str("5").unwrap();
        assert_eq!(w.0, rat(5));
        assert_eq!(serde_json::to_string(&WireRational(ratio(1, -2))).unwrap(), r#"["-1","2"]"#);
    }

    #[test]
    fn primitive_direction_clears_denominators() {
        let v = vec![ratio(1, 2), ratio(-3, 4), rat(0)];
        assert_eq!(primitive_direction(&v), vec![int(2), int(-3), int(0)]);
    }
}
