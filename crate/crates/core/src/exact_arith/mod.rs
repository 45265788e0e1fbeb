//! Ground-field arithmetic: big rationals, cyclotomic field elements and
//! high-precision complex floats, unified behind the [`Scalar`] trait so the
//! series code can run in exact or numeric mode.

mod approx;
mod cyclotomic;
pub mod rational;
mod upoly;

use std::fmt;

use num::BigRational;

pub use approx::{default_precision, set_default_precision, ulp, ApproxScalar, Float, DEFAULT_PRECISION};
pub use cyclotomic::{cyclo_normalize, cyclotomic_polynomial, euler_totient, ExactScalar};
pub use rational::{format_rational, parse_rational};

use crate::error::{Error, Result};

/// Field operations shared by the exact and numeric scalar kinds.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_exact(x: &ExactScalar) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn abs_f64(&self) -> f64;
    /// `(base; q)_∞`, only available in numeric mode.
    fn qpoch_infinite(base: &Self, q: &Self, tol: f64) -> Result<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// The value as a plain rational, when it is one exactly.
    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { Self::one().div(self)? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        ExactScalar::from_rational(r.clone())
    }
    fn from_exact(x: &ExactScalar) -> Self {
        x.clone()
    }
    fn add(&self, other: &Self) -> Self {
        ExactScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ExactScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ExactScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        ExactScalar::neg(self)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.field_div(other)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn is_one(&self) -> bool {
        ExactScalar::is_one(self)
    }
    fn abs_f64(&self) -> f64 {
        ExactScalar::abs_f64(self)
    }
    fn qpoch_infinite(_: &Self, _: &Self, _: f64) -> Result<Self> {
        Err(Error::InvalidDomain("infinite q-Pochhammer product in exact mode".into()))
    }
    fn to_rational(&self) -> Option<BigRational> {
        self.as_rational().cloned()
    }
    fn pow(&self, e: i64) -> Result<Self> {
        ExactScalar::pow(self, e)
    }
}

impl Scalar for ApproxScalar {
    const EXACT: bool = false;

    fn zero() -> Self {
        ApproxScalar::zero()
    }
    fn one() -> Self {
        ApproxScalar::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        ApproxScalar::from_rational(r)
    }
    fn from_exact(x: &ExactScalar) -> Self {
        ApproxScalar::from(x)
    }
    fn add(&self, other: &Self) -> Self {
        ApproxScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ApproxScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ApproxScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        ApproxScalar::neg(self)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        ApproxScalar::div(self, other)
    }
    fn is_zero(&self) -> bool {
        ApproxScalar::is_zero(self)
    }
    fn is_one(&self) -> bool {
        self.sub(&ApproxScalar::one()).is_zero()
    }
    fn abs_f64(&self) -> f64 {
        ApproxScalar::abs_f64(self)
    }
    fn qpoch_infinite(base: &Self, q: &Self, tol: f64) -> Result<Self> {
        crate::qseries::qpoch_infinite(base, q, tol).map(|v| v.value)
    }
}
