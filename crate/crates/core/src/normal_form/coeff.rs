//! Coefficient rings for polynomial Hamiltonians: exact Gaussian rationals
//! and complex floating point.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use faer::c64;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Complex numbers with arbitrary-precision rational parts.
pub type GaussRational = Complex<BigRational>;

pub trait Coeff:
    Clone + Debug + PartialEq + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn imag() -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> c64;
    /// Text form used by the serializer.
    fn render(&self) -> String;
    fn parse(s: &str) -> Result<Self>;

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    fn div_int(&self, d: i64) -> Self {
        self.clone() * Self::ratio(1, d)
    }
}

impl Coeff for c64 {
    fn zero() -> Self {
        c64::new(0.0, 0.0)
    }
    fn one() -> Self {
        c64::new(1.0, 0.0)
    }
    fn imag() -> Self {
        c64::new(0.0, 1.0)
    }
    fn ratio(num: i64, den: i64) -> Self {
        c64::new(num as f64 / den as f64, 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_c64(&self) -> c64 {
        *self
    }
    fn render(&self) -> String {
        format!("{:.17e} {:.17e}", self.re, self.im)
    }
    fn parse(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let mut next = || -> Result<f64> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad float coefficient '{s}'")))
        };
        Ok(c64::new(next()?, next()?))
    }
    fn div_int(&self, d: i64) -> Self {
        self / d as f64
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large parts: scale down before converting
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl Coeff for GaussRational {
    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn imag() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn ratio(num: i64, den: i64) -> Self {
        Complex::new(rat(num, den), BigRational::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_c64(&self) -> c64 {
        c64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn render(&self) -> String {
        format!("{} {}", self.re, self.im)
    }
    fn parse(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let mut next = || -> Result<BigRational> {
            it.next()
                .and_then(|t| BigRational::from_str(t).ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad rational coefficient '{s}'")))
        };
        Ok(Complex::new(next()?, next()?))
    }
    fn div_int(&self, d: i64) -> Self {
        let d = BigRational::from_integer(BigInt::from(d));
        Complex::new(&self.re / &d, &self.im / &d)
    }
}
