//! Dense univariate polynomials over the rationals, lowest degree first.
//! Only what cyclotomic reduction and inversion need.

use num::{BigRational, One, Zero};

pub(crate) type UPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut UPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out: UPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (UPoly, UPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem: UPoly = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] / &lead;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            if !bj.is_zero() {
                rem[shift + j] -= &c * bj;
            }
        }
        quot[shift] = c;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Remainder modulo a monic polynomial of degree `d`, padded to exactly `d` coefficients.
pub(crate) fn reduce_monic(p: &[BigRational], modulus: &[BigRational]) -> UPoly {
    let d = modulus.len() - 1;
    let mut work: UPoly = p.to_vec();
    if work.len() > d {
        for i in (d..work.len()).rev() {
            if work[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut work[i]);
            for (j, mj) in modulus.iter().enumerate().take(d) {
                if !mj.is_zero() {
                    work[i - d + j] -= &c * mj;
                }
            }
        }
        work.truncate(d);
    }
    work.resize(d, BigRational::zero());
    work
}

/// Inverse of `f` modulo `m` via the extended Euclidean algorithm.
/// Returns `None` when `gcd(f, m)` is not a unit.
pub(crate) fn inverse_mod(f: &[BigRational], m: &[BigRational]) -> Option<UPoly> {
    let mut r0: UPoly = m.to_vec();
    let mut r1: UPoly = f.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: UPoly = Vec::new();
    let mut s1: UPoly = vec![BigRational::one()];
    while degree(&r1).is_some() {
        let (q, r) = divrem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is the gcd, s0 * f == r0 (mod m)
    if degree(&r0) != Some(0) {
        return None;
    }
    let g = r0[0].clone();
    Some(s0.into_iter().map(|c| c / &g).collect())
}
