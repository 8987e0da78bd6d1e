//! Exact scalar arithmetic for the dimensional constants.
//!
//! Every closed-form constant in this crate is a rational multiple of an
//! integer power of pi. Keeping the rational part as arbitrary-precision
//! `BigRational` lets identity checks between independently constructed
//! constants be performed with zero tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A number of the form `rational * pi^pi_power` with exact rational part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactConstant {
    rational: BigRational,
    pi_power: i32,
}

impl ExactConstant {
    pub fn new(rational: BigRational, pi_power: i32) -> Self {
        // Normalize zero so equality checks do not depend on the pi power.
        if rational.is_zero() {
            return Self {
                rational,
                pi_power: 0,
            };
        }
        Self { rational, pi_power }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), 0)
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), 0)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            0,
        )
    }

    /// `num/den * pi^pi_power` from big integer parts.
    pub fn from_big_ratio(num: BigInt, den: BigInt, pi_power: i32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::new(BigRational::new(num, den), pi_power)
    }

    pub fn rational(&self) -> &BigRational {
        &self.rational
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.rational.is_negative()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new(self.rational.recip(), -self.pi_power)
    }

    /// Integer power (negative exponents allowed for nonzero values).
    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::one();
        }
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = &acc * self;
        }
        acc
    }

    /// Nearest double, combining the rational part with pi^pi_power.
    pub fn to_f64(&self) -> f64 {
        let r = self
            .rational
            .to_f64()
            .expect("rational part representable as f64");
        r * std::f64::consts::PI.powi(self.pi_power)
    }
}

impl Add for &ExactConstant {
    type Output = ExactConstant;
    fn add(self, rhs: &ExactConstant) -> ExactConstant {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.pi_power, rhs.pi_power,
            "adding constants with different pi powers ({} vs {})",
            self.pi_power, rhs.pi_power
        );
        ExactConstant::new(&self.rational + &rhs.rational, self.pi_power)
    }
}

impl Sub for &ExactConstant {
    type Output = ExactConstant;
    fn sub(self, rhs: &ExactConstant) -> ExactConstant {
        self + &(-rhs)
    }
}

impl Mul for &ExactConstant {
    type Output = ExactConstant;
    fn mul(self, rhs: &ExactConstant) -> ExactConstant {
        ExactConstant::new(&self.rational * &rhs.rational, self.pi_power + rhs.pi_power)
    }
}

impl Div for &ExactConstant {
    type Output = ExactConstant;
    fn div(self, rhs: &ExactConstant) -> ExactConstant {
        self * &rhs.recip()
    }
}

impl Neg for &ExactConstant {
    type Output = ExactConstant;
    fn neg(self) -> ExactConstant {
        ExactConstant::new(-self.rational.clone(), self.pi_power)
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi_power == 0 {
            write!(f, "{}", self.rational)
        } else if self.pi_power == 1 {
            write!(f, "{} pi", self.rational)
        } else {
            write!(f, "{} pi^{}", self.rational, self.pi_power)
        }
    }
}

impl Serialize for ExactConstant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExactConstant", 4)?;
        s.serialize_field("numerator", &self.rational.numer().to_string())?;
        s.serialize_field("denominator", &self.rational.denom().to_string())?;
        s.serialize_field("pi_power", &self.pi_power)?;
        s.serialize_field("value", &self.to_f64())?;
        s.end()
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Odd double factorial `n!! = n (n-2) (n-4) ...` for odd `n` (with `(-1)!! = 1`).
pub fn double_factorial(n: i64) -> BigInt {
    assert!(n >= -1, "double factorial domain");
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi_frac(num: i64, den: i64, pow: i32) -> ExactConstant {
        ExactConstant::from_big_ratio(BigInt::from(num), BigInt::from(den), pow)
    }

    #[test]
    fn float_projection_matches_components() {
        let c = pi_frac(32, 1, 2);
        assert!((c.to_f64() - 32.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn arithmetic_tracks_pi_powers() {
        let a = pi_frac(2, 1, 1);
        let b = pi_frac(3, 4, -1);
        let prod = &a * &b;
        assert_eq!(prod.pi_power(), 0);
        assert_eq!(prod, pi_frac(3, 2, 0));
        let quot = &a / &b;
        assert_eq!(quot.pi_power(), 2);
        assert_eq!(quot, pi_frac(8, 3, 2));
    }

    #[test]
    #[should_panic(expected = "different pi powers")]
    fn addition_requires_matching_pi_power() {
        let a = pi_frac(1, 1, 1);
        let b = pi_frac(1, 1, 2);
        let _ = &a + &b;
    }

    #[test]
    fn zero_is_pi_power_agnostic() {
        let z = &pi_frac(1, 2, 3) - &pi_frac(1, 2, 3);
        assert!(z.is_zero());
        let sum = &z + &pi_frac(5, 1, -2);
        assert_eq!(sum, pi_frac(5, 1, -2));
    }

    #[test]
    fn factorial_and_double_factorial() {
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(double_factorial(7), BigInt::from(105));
        assert_eq!(double_factorial(-1), BigInt::from(1));
        assert_eq!(binomial(11, 5), BigInt::from(462));
    }
}
