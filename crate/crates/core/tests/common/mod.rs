//! Seeded property checks shared by the property and acceptance targets.
#![allow(dead_code)]

use num::BigRational;
use qforge::exact_arith::{cyclo_normalize, ApproxScalar, ExactScalar};
use qforge::qseries::{phi21_exact, phi21_numeric, qpoch_finite, Phi21Params};
use qforge::relations::{point_of, relation_for, ShiftVector, TABLE_SHIFTS};
use qforge::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const CASES: usize = 1000;
pub const FIELD_ORDERS: [u32; 5] = [1, 3, 4, 5, 6];

pub fn rational(rng: &mut ChaCha8Rng, height: i64) -> BigRational {
    BigRational::new(rng.gen_range(-height..=height).into(), rng.gen_range(1..=height).into())
}

pub fn ex(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_rational(BigRational::new(n.into(), d.into()))
}

/// Random element of `Q(ζ_order)` with small coefficients.
pub fn cyclotomic(rng: &mut ChaCha8Rng, order: u32) -> ExactScalar {
    let coeffs: Vec<BigRational> = (0..order.max(1)).map(|_| rational(rng, 9)).collect();
    cyclo_normalize(&coeffs, order)
}

/// Nonzero rational `q` with `|q| < 1`.
pub fn small_q(rng: &mut ChaCha8Rng) -> ExactScalar {
    let den = rng.gen_range(2..=9i64);
    let mut num = rng.gen_range(-(den - 1)..=den - 1);
    if num == 0 {
        num = 1;
    }
    ex(num, den)
}

/// Field axioms on three random elements of `Q(ζ_order)`.
pub fn field_axioms_case(rng: &mut ChaCha8Rng, order: u32) -> Result<(), String> {
    let (a, b, c) = (cyclotomic(rng, order), cyclotomic(rng, order), cyclotomic(rng, order));
    let zero = ExactScalar::zero();
    let one = ExactScalar::one();
    let checks = [
        ("add commutes", a.add(&b) == b.add(&a)),
        ("mul commutes", a.mul(&b) == b.mul(&a)),
        ("add associates", a.add(&b).add(&c) == a.add(&b.add(&c))),
        ("mul associates", a.mul(&b).mul(&c) == a.mul(&b.mul(&c))),
        ("distributes", a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c))),
        ("additive identity", a.add(&zero) == a),
        ("multiplicative identity", a.mul(&one) == a),
        ("additive inverse", a.add(&a.neg()).is_zero()),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(format!("order {order}: {name} fails for {a}, {b}, {c}"));
    }
    if !a.is_zero() {
        let inv = a.inv().map_err(|e| e.to_string())?;
        if !a.mul(&inv).is_one() {
            return Err(format!("order {order}: {a} times its inverse {inv} is not 1"));
        }
    }
    Ok(())
}

/// `(a;q)_{n+1} = (a;q)_n (1 - a q^n)`, and the tabulated relations hold
/// exactly at a point where all three series terminate. `Ok(false)` when the
/// point meets a vanishing denominator.
pub fn recurrence_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let q = small_q(rng);
    let a = ExactScalar::from_rational(rational(rng, 20));
    let n = rng.gen_range(0..12usize);
    let lhs = qpoch_finite(&a, &q, n + 1);
    let rhs = qpoch_finite(&a, &q, n).mul(&ExactScalar::one().sub(&a.mul(&q.pow(n as i64).unwrap())));
    if lhs != rhs {
        return Err(format!("Pochhammer recurrence fails at a={a} q={q} n={n}"));
    }
    let shift = TABLE_SHIFTS[rng.gen_range(0..TABLE_SHIFTS.len())];
    let r = rng.gen_range(3..8i64);
    let b = q.pow(-r).unwrap();
    let c = ExactScalar::from_rational(rational(rng, 20));
    let x = ExactScalar::from_rational(rational(rng, 20));
    match exact_relation_gap(shift, Phi21Params::new(a, b, c, q, x)) {
        Ok(gap) if gap.is_zero() => Ok(true),
        Ok(gap) => Err(format!("relation {shift} leaves {gap}")),
        Err(Error::ZeroDenominator(_) | Error::DivisionByZero) => Ok(false),
        Err(e) => Err(e.to_string()),
    }
}

fn shifted(p: &Phi21Params<ExactScalar>, s: ShiftVector) -> qforge::Result<Phi21Params<ExactScalar>> {
    let sh = |v: &ExactScalar, k: i64| -> qforge::Result<ExactScalar> { Ok(v.mul(&p.q.pow(k)?)) };
    Ok(Phi21Params::new(sh(&p.a, s.k)?, sh(&p.b, s.l)?, sh(&p.c, s.m)?, p.q.clone(), sh(&p.x, s.n)?))
}

/// `φ(shifted) - Q φ(up) - R φ(base)`, exactly.
pub fn exact_relation_gap(shift: ShiftVector, p: Phi21Params<ExactScalar>) -> qforge::Result<ExactScalar> {
    let rel = relation_for(shift)?;
    let q = rel.q.eval(&point_of(&p))?;
    let r = rel.r.eval(&point_of(&p))?;
    let top = phi21_exact(&shifted(&p, shift)?)?.value;
    let up = phi21_exact(&shifted(&p, ShiftVector::new(1, 1, 1, 0))?)?.value;
    let base = phi21_exact(&p)?.value;
    Ok(top.sub(&q.mul(&up)).sub(&r.mul(&base)))
}

/// Terminating `₂φ₁` is symmetric in its numerator parameters.
pub fn symmetry_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let q = small_q(rng);
    let a = q.pow(-rng.gen_range(0..8i64)).unwrap();
    let b = q.pow(-rng.gen_range(0..8i64)).unwrap();
    let c = ExactScalar::from_rational(rational(rng, 30));
    let x = ExactScalar::from_rational(rational(rng, 30));
    let p = Phi21Params::new(a, b, c, q, x);
    match (phi21_exact(&p), phi21_exact(&p.swapped())) {
        (Ok(u), Ok(v)) if u.value == v.value => Ok(true),
        (Ok(u), Ok(v)) => Err(format!("{} != {} at {p:?}", u.value, v.value)),
        (Err(_), Err(_)) => Ok(false),
        (u, v) => Err(format!("one side failed at {p:?}: {:?} / {:?}", u.err(), v.err())),
    }
}

/// Exact and numeric evaluation of a terminating series agree within the
/// certified bound.
pub fn agreement_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let q = small_q(rng);
    let b = q.pow(-rng.gen_range(0..10i64)).unwrap();
    let a = ExactScalar::from_rational(rational(rng, 30));
    let c = ExactScalar::from_rational(rational(rng, 30));
    let x = ExactScalar::from_rational(rational(rng, 30));
    let p = Phi21Params::new(a, b, c, q, x);
    let exact = match phi21_exact(&p) {
        Ok(v) => v.value,
        Err(Error::ZeroDenominator(_) | Error::DivisionByZero) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    let approx = phi21_numeric(&p.to_approx(), 1e-30).map_err(|e| e.to_string())?.value;
    let diff = approx.sub(&ApproxScalar::from(&exact)).abs_f64();
    let bound = approx.err + 1e-20 * exact.abs_f64().max(1.0);
    if diff <= bound {
        Ok(true)
    } else {
        Err(format!("exact {exact} vs numeric {approx}: gap {diff:e} > {bound:e}"))
    }
}

/// Runs `case` until `CASES` cases are exercised; errors on the first
/// failure or once skipped draws exceed `CASES`.
pub fn run_cases(seed: u64, mut case: impl FnMut(&mut ChaCha8Rng) -> Result<bool, String>) -> Result<usize, String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut skipped) = (0, 0);
    while done < CASES {
        if case(&mut rng)? {
            done += 1;
        } else {
            skipped += 1;
            if skipped > CASES {
                return Err(format!("{skipped} skipped draws"));
            }
        }
    }
    Ok(skipped)
}
