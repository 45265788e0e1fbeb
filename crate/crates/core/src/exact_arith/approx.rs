//! High-precision complex floats with a propagated absolute error bound.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num::{BigInt, BigRational};

use super::cyclotomic::ExactScalar;
use crate::error::{Error, Result};

pub type Float = FBig<HalfEven, 2>;

pub const DEFAULT_PRECISION: usize = 113;
pub const MIN_PRECISION: usize = 64;

static PRECISION: AtomicUsize = AtomicUsize::new(DEFAULT_PRECISION);

/// Mantissa bits used for newly created values.
pub fn default_precision() -> usize {
    PRECISION.load(Ordering::Relaxed)
}

/// Set the mantissa precision for new values; clamped below at 64 bits.
pub fn set_default_precision(bits: usize) {
    PRECISION.store(bits.max(MIN_PRECISION), Ordering::Relaxed);
}

fn bigint_to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    if sign == num::bigint::Sign::Minus {
        -mag
    } else {
        mag
    }
}

fn float_from_rational(r: &BigRational, prec: usize) -> Float {
    let n = Float::from(bigint_to_ibig(r.numer())).with_precision(prec).value();
    let d = Float::from(bigint_to_ibig(r.denom())).with_precision(prec).value();
    n / d
}

fn zero_float(prec: usize) -> Float {
    Float::ZERO.with_precision(prec).value()
}

fn to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

/// A complex number `re + i·im` carried at a fixed binary precision, with an
/// absolute error bound `err`. When `certified` is set the bound is rigorous
/// (up to double-precision evaluation of the bound itself); otherwise it is
/// an estimate.
#[derive(Clone, Debug)]
pub struct ApproxScalar {
    pub re: Float,
    pub im: Float,
    pub err: f64,
    pub certified: bool,
}

impl ApproxScalar {
    pub fn from_rational_prec(r: &BigRational, prec: usize) -> Self {
        let re = float_from_rational(r, prec);
        let err = if r.denom() == &BigInt::from(1) && r.numer().bits() as usize <= prec {
            0.0
        } else {
            to_f64(&re).abs() * ulp(prec) * 2.0
        };
        ApproxScalar { re, im: zero_float(prec), err, certified: true }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_rational_prec(r, default_precision())
    }

    pub fn from_f64(x: f64) -> Self {
        let prec = default_precision();
        let re = Float::try_from(x).map(|f| f.with_precision(prec).value()).unwrap_or_else(|_| zero_float(prec));
        ApproxScalar { re, im: zero_float(prec), err: 0.0, certified: true }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let prec = default_precision();
        ApproxScalar {
            re: Float::from(n).with_precision(prec).value(),
            im: zero_float(prec),
            err: 0.0,
            certified: true,
        }
    }

    /// `ζ_n = exp(2πi/n)`, refined by Newton's method on `z^n = 1` from a
    /// double-precision seed.
    pub fn root_of_unity(n: u32, prec: usize) -> Self {
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        let seed = |v: f64| Float::try_from(v).unwrap().with_precision(prec).value();
        let mut z = ApproxScalar { re: seed(theta.cos()), im: seed(theta.sin()), err: 0.0, certified: true };
        let nn = Self::from_int(n as i64).with_prec(prec);
        let one = Self::one().with_prec(prec);
        let mut iters = 0;
        let mut correct_bits = 50usize;
        while correct_bits < prec + 8 && iters < 64 {
            let zn1 = z.powu(n as u64 - 1);
            let f = zn1.mul(&z).sub(&one);
            let step = f.div(&nn.mul(&zn1)).expect("root of unity iteration");
            z = z.sub(&step);
            correct_bits *= 2;
            iters += 1;
        }
        z.err = ulp(prec) * 4.0;
        z.certified = true;
        z
    }

    fn with_prec(mut self, prec: usize) -> Self {
        self.re = self.re.with_precision(prec).value();
        self.im = self.im.with_precision(prec).value();
        self
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn re_f64(&self) -> f64 {
        to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64(&self.im)
    }

    pub fn abs_f64(&self) -> f64 {
        self.re_f64().hypot(self.im_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re == Float::ZERO && self.im == Float::ZERO
    }

    fn unit_roundoff(&self, other: &Self) -> f64 {
        ulp(self.precision().max(other.precision()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let re = &self.re + &other.re;
        let im = &self.im + &other.im;
        let u = self.unit_roundoff(other);
        let mag = to_f64(&re).hypot(to_f64(&im));
        ApproxScalar { re, im, err: self.err + other.err + mag * u, certified: self.certified && other.certified }
    }

    pub fn neg(&self) -> Self {
        ApproxScalar { re: -self.re.clone(), im: -self.im.clone(), err: self.err, certified: self.certified }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        let u = self.unit_roundoff(other);
        let (x, y) = (self.abs_f64(), other.abs_f64());
        let err = x * other.err + y * self.err + self.err * other.err + 4.0 * x * y * u;
        ApproxScalar { re, im, err, certified: self.certified && other.certified }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let den = &other.re * &other.re + &other.im * &other.im;
        let re = (&self.re * &other.re + &self.im * &other.im) / &den;
        let im = (&self.im * &other.re - &self.re * &other.im) / &den;
        let u = self.unit_roundoff(other);
        let (x, y) = (self.abs_f64(), other.abs_f64());
        let mag = to_f64(&re).hypot(to_f64(&im));
        let (err, certified) = if y > other.err {
            ((x * other.err + y * self.err) / (y * (y - other.err)) + 8.0 * mag * u, self.certified && other.certified)
        } else {
            (f64::INFINITY, false)
        };
        Ok(ApproxScalar { re, im, err, certified })
    }

    pub fn powu(&self, mut e: u64) -> Self {
        let mut acc = Self::one().with_prec(self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Mark the value as carrying only a heuristic error estimate.
    pub fn uncertified(mut self) -> Self {
        self.certified = false;
        self
    }

    pub fn with_extra_err(mut self, extra: f64) -> Self {
        self.err += extra;
        self
    }
}

/// `2^(1 - prec)`.
pub fn ulp(prec: usize) -> f64 {
    2f64.powi(1 - prec as i32)
}

impl ApproxScalar {
    pub fn from_exact_prec(x: &ExactScalar, prec: usize) -> Self {
        if let Some(r) = x.as_rational() {
            return Self::from_rational_prec(r, prec);
        }
        let z = Self::root_of_unity(x.order(), prec);
        let mut acc = Self::zero().with_prec(prec);
        let mut power = Self::one().with_prec(prec);
        for c in x.coeffs() {
            if !num::Zero::is_zero(c) {
                acc = acc.add(&power.mul(&Self::from_rational_prec(c, prec)));
            }
            power = power.mul(&z);
        }
        acc
    }
}

impl From<&ExactScalar> for ApproxScalar {
    fn from(x: &ExactScalar) -> Self {
        Self::from_exact_prec(x, default_precision())
    }
}

impl fmt::Display for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.re_f64(), self.im_f64());
        if im == 0.0 {
            write!(f, "{re:.17e}")
        } else if im.is_sign_negative() {
            write!(f, "{re:.17e}-{:.17e}i", -im)
        } else {
            write!(f, "{re:.17e}+{im:.17e}i")
        }
    }
}
