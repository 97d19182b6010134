//! Scalar arithmetic: arbitrary-precision rationals and `f64`, plus the trait
//! bound shared by the generic matrix code. A computation runs entirely in one
//! mode; conversions happen only at explicit boundaries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact scalar: arbitrary-precision rational. `num` keeps p/q reduced with
/// q > 0 after every operation.
pub type Rational = BigRational;

/// Field operations needed by the generic dense kernels.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Sum
{
}

impl Scalar for Rational {}
impl Scalar for f64 {}

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational p/q. Panics on q = 0.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Nearest `f64` to a rational.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy conversions for extreme magnitudes.
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Exact rational equal to the given finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses "p/q" or "p" (decimal integers, optional sign).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(p))
        }
    }
}

/// Formats as "p/q", or "p" when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Scales a rational vector to a primitive integer vector, preserving
/// direction: entries become coprime integers and the scaling factor is
/// positive. Returns the input unchanged if it is all zero.
pub fn normalize_ray(v: &[Rational]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = gcd.gcd(n);
    }
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|n| Rational::from_integer(n / &gcd))
        .collect()
}

/// Serde adapter: a rational as the string "p/q" (or "p" when q = 1).
pub mod rat_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rational '{s}'")))
    }
}

/// Serde adapter: a rational vector as a list of "p/q" strings.
pub mod rat_vec_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| {
                parse_rational(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("invalid rational '{s}'")))
            })
            .collect()
    }
}

/// Serde adapter: a rational matrix as nested lists of "p/q" strings.
pub mod rat_mat_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            v.iter()
                .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let strs = Vec::<Vec<String>>::deserialize(d)?;
        strs.iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        parse_rational(s).ok_or_else(|| {
                            serde::de::Error::custom(format!("invalid rational '{s}'"))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn normalize_ray_makes_primitive_integers() {
        let v = vec![ratio(1, 2), ratio(-3, 4), rat(0)];
        let n = normalize_ray(&v);
        assert_eq!(n, vec![rat(2), rat(-3), rat(0)]);
        // Direction is preserved (positive scaling only).
        assert_eq!(normalize_ray(&[rat(-2), rat(-4)]), vec![rat(-1), rat(-2)]);
    }
}
