use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A scalar drawn from one of the two supported fields.
///
/// Implemented by [`Rational`] (exact, `EXACT = true`) and by `f64`. All
/// operations are pure; exact-mode arithmetic never rounds.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True when arithmetic in this field is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// The fraction `num/den`. Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Field division. Caller guarantees `rhs != 0`.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    /// |self| as an `f64`; used for pivoting and residual reporting.
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;
    fn compare(&self, rhs: &Self) -> Option<Ordering>;
}

/// `base^exp` by binary exponentiation; negative exponents go through the
/// reciprocal, so the base must be nonzero in that case.
pub fn powi<T: Scalar>(base: &T, exp: i64) -> T {
    if exp < 0 {
        let inv = T::one().div(base);
        return powi(&inv, -exp);
    }
    let mut acc = T::one();
    let mut sq = base.clone();
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc
}

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (maintained by the underlying representation).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an `i64`, when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.0.is_integer() {
            return None;
        }
        self.0.numer().to_i64()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.0.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Parses "p/q", plain integers, and decimal literals such as "-0.125".
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        if let Ok(r) = BigRational::from_str(t) {
            return Ok(Rational(r));
        }
        // decimal form: [sign] digits [. digits]
        let (sign, rest) = match t.strip_prefix('-') {
            Some(r) => (-1i64, r),
            None => (1i64, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((a, b)) => (a, b),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("cannot parse '{text}' as a rational"));
        }
        let digits: String = format!("{int_part}{frac_part}");
        if digits.chars().any(|c| !c.is_ascii_digit()) {
            return Err(format!("cannot parse '{text}' as a rational"));
        }
        let numer = BigInt::from_str(&digits).map_err(|e| e.to_string())?;
        let denom = num::pow::pow(BigInt::from(10), frac_part.len());
        Ok(Rational(BigRational::new(BigInt::from(sign) * numer, denom)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl std::ops::Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> serde::de::Visitor<'de> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a rational as \"p/q\", an integer, or a decimal number")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Rational, E> {
                Rational::parse(v).map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(BigInt::from(v))))
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Rational, E> {
                BigRational::from_float(v)
                    .map(Rational)
                    .ok_or_else(|| E::custom("non-finite float"))
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_int(n: i64) -> Self {
        Rational::from(n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        Rational(&self.0 / &rhs.0)
    }
    fn neg(&self) -> Self {
        Rational(-self.0.clone())
    }
    fn magnitude(&self) -> f64 {
        self.0.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn compare(&self, rhs: &Self) -> Option<Ordering> {
        Some(self.0.cmp(&rhs.0))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn compare(&self, rhs: &Self) -> Option<Ordering> {
        self.partial_cmp(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lowest_terms_positive_denominator() {
        let r = Rational::new(4, -6);
        assert_eq!(r.to_string(), "-2/3");
        assert_eq!(r, Rational::new(-2, 3));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Rational::parse("3/4").unwrap(), Rational::new(3, 4));
        assert_eq!(Rational::parse("-7").unwrap(), Rational::from(-7));
        assert_eq!(Rational::parse("0.125").unwrap(), Rational::new(1, 8));
        assert_eq!(Rational::parse("-0.25").unwrap(), Rational::new(-1, 4));
        assert!(Rational::parse("x").is_err());
    }

    #[test]
    fn powi_negative_exponent() {
        let r = Rational::new(2, 3);
        assert_eq!(powi(&r, -2), Rational::new(9, 4));
        assert_eq!(powi(&r, 0), Rational::one());
        assert_eq!(powi(&0.5f64, 3), 0.125);
    }

    #[test]
    fn serde_round_trip() {
        let r = Rational::new(-5, 8);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"-5/8\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let from_num: Rational = serde_json::from_str("0.5").unwrap();
        assert_eq!(from_num, Rational::new(1, 2));
    }
}
