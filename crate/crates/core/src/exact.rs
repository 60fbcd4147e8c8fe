//! Exact complex scalars with arbitrary-precision rational parts.
//!
//! Function values, convolutions and partial sums are kept in this type so
//! that identities like the vanishing period sum can be tested with exact
//! equality; conversion to `f64` happens only at analytic boundaries.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// Real scalar from an integer.
    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Real scalar num/den.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = re^2 + im^2, exact.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn re_f64(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest absolute value of the two components, as f64. Used by the
    /// tolerance-mode validator to measure residuals.
    pub fn abs_bound_f64(&self) -> f64 {
        self.re_f64().abs().max(self.im_f64().abs())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        ExactScalar::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &'a ExactScalar) -> ExactScalar {
        ExactScalar::new(self.re + &rhs.re, self.im + &rhs.im)
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        ExactScalar::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.re, -self.im)
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl<'b> Mul<&'b ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &'b ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl Mul<i64> for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: i64) -> ExactScalar {
        let r = BigRational::from_integer(BigInt::from(rhs));
        ExactScalar::new(self.re * &r, self.im * r)
    }
}

/// Parse a rational serialized as `"num/den"` (or a bare integer `"num"`).
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num)
        .map_err(|_| Error::RationalParse(s.to_string()))?;
    let den = BigInt::from_str(den)
        .map_err(|_| Error::RationalParse(s.to_string()))?;
    if den.is_zero() {
        return Err(Error::RationalParse(format!("{s}: zero denominator")));
    }
    Ok(BigRational::new(num, den))
}

/// Serialize a rational as `"num/den"` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Check |r| <= 1/10^12 exactly in rational arithmetic.
pub fn within_default_tolerance(r: &BigRational) -> bool {
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10i64.pow(12)));
    r.abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = ExactScalar::from_ratio(1, 3);
        let b = ExactScalar::from_ratio(1, 6);
        assert_eq!(a.clone() + &b, ExactScalar::from_ratio(1, 2));
        let i = ExactScalar::new(BigRational::zero(), BigRational::one());
        assert_eq!(&i * &i, ExactScalar::from_int(-1));
        assert_eq!(i.conj(), ExactScalar::new(BigRational::zero(), -BigRational::one()));
    }

    #[test]
    fn norm_sq_of_gaussian_integer() {
        let z = ExactScalar::new(
            BigRational::from_integer(BigInt::from(3)),
            BigRational::from_integer(BigInt::from(4)),
        );
        assert_eq!(z.norm_sq(), BigRational::from_integer(BigInt::from(25)));
    }

    #[test]
    fn rational_round_trip() {
        let r = parse_rational("-7/3").unwrap();
        assert_eq!(format_rational(&r), "-7/3");
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(BigInt::from(5)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
