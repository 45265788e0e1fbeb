//! Elements of cyclotomic fields `Q(ζ_n)`.
//!
//! An [`ExactScalar`] of order `n` is a polynomial in `ζ_n` with rational
//! coefficients, kept reduced modulo the `n`-th cyclotomic polynomial so
//! that the coefficient vector (of length `φ(n)`) is canonical. Order 1 is
//! the plain rationals.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};

use super::rational::{format_rational, parse_rational, rat_to_f64};
use super::upoly;
use crate::error::{Error, Result};

type Modulus = Arc<Vec<BigRational>>;

fn cache() -> &'static Mutex<HashMap<u32, Modulus>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Modulus>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_n`, lowest degree first. Computed as
/// `(x^n - 1) / ∏_{d | n, d < n} Φ_d` and cached per order.
pub fn cyclotomic_polynomial(n: u32) -> Modulus {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut p: Vec<BigRational> = vec![BigRational::zero(); n as usize + 1];
    p[0] = -BigRational::one();
    p[n as usize] = BigRational::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d);
        let (quot, rem) = upoly::divrem(&p, &phi_d);
        debug_assert!(upoly::degree(&rem).is_none());
        p = quot;
    }
    let p = Arc::new(p);
    cache().lock().unwrap().insert(n, p.clone());
    p
}

pub fn euler_totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An exact element of `Q(ζ_order)`.
#[derive(Clone, Debug)]
pub struct ExactScalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

/// Reduce an arbitrary polynomial in `ζ_order` to its canonical residue.
pub fn cyclo_normalize(coeffs: &[BigRational], order: u32) -> ExactScalar {
    let modulus = cyclotomic_polynomial(order);
    ExactScalar { order, coeffs: upoly::reduce_monic(coeffs, &modulus) }
}

impl ExactScalar {
    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The primitive root `ζ_n = exp(2πi/n)`.
    pub fn zeta(n: u32) -> Self {
        let mut c = vec![BigRational::zero(); 2];
        c[1] = BigRational::one();
        cyclo_normalize(&c, n)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(One::is_one)
    }

    /// Re-express in `Q(ζ_target)`; `target` must be a multiple of the order.
    pub fn embed(&self, target: u32) -> Self {
        assert!(target.is_multiple_of(self.order), "cannot embed order {} into {}", self.order, target);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut c = vec![BigRational::zero(); step * self.coeffs.len()];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[i * step] = x.clone();
        }
        cyclo_normalize(&c, target)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let l = self.order.lcm(&other.order);
        (self.embed(l), other.embed(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.order == other.order {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return ExactScalar { order: self.order, coeffs };
        }
        let (a, b) = self.aligned(other);
        a.add(&b)
    }

    pub fn neg(&self) -> Self {
        ExactScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order != other.order {
            let (a, b) = self.aligned(other);
            return a.mul(&b);
        }
        if self.order == 1 {
            return Self::from_rational(&self.coeffs[0] * &other.coeffs[0]);
        }
        cyclo_normalize(&upoly::mul(&self.coeffs, &other.coeffs), self.order)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        ExactScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Self::from_rational(self.coeffs[0].recip()));
        }
        let modulus = cyclotomic_polynomial(self.order);
        let inv = upoly::inverse_mod(&self.coeffs, &modulus).ok_or(Error::DivisionByZero)?;
        Ok(cyclo_normalize(&inv, self.order))
    }

    pub fn field_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = ExactScalar { order: self.order, coeffs: Self::one().embed(self.order).coeffs };
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

    /// Value at `ζ_n = exp(2πi/n)` in double precision.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI / self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
            let v = rat_to_f64(c);
            let a = theta * i as f64;
            (re + v * a.cos(), im + v * a.sin())
        })
    }

    /// `|x|` in double precision (exact comparison is only possible in `Q`).
    pub fn abs_f64(&self) -> f64 {
        match self.as_rational() {
            Some(r) => rat_to_f64(&r.abs()),
            None => {
                let (re, im) = self.to_complex_f64();
                re.hypot(im)
            }
        }
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for ExactScalar {}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return f.write_str(&format_rational(r));
        }
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "cyclo({})[{}]", self.order, parts.join(", "))
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix("cyclo(") else {
            return Ok(Self::from_rational(parse_rational(s)?));
        };
        let bad = || Error::Parse(format!("invalid cyclotomic literal `{s}`"));
        let (order, rest) = rest.split_once(')').ok_or_else(bad)?;
        let order: u32 = order.trim().parse().map_err(|_| bad())?;
        if order == 0 {
            return Err(bad());
        }
        let body = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let coeffs = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?
        };
        Ok(cyclo_normalize(&coeffs, order))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar::$inner(self, rhs)
            }
        }
        impl std::ops::$tr for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar::$inner(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::neg(&self)
    }
}
