//! q-Pochhammer symbols and the `₂φ₁` basic hypergeometric series.
//!
//! Three evaluation routes are provided:
//! - [`phi21_exact`]: terminating (and exceptional) series summed exactly;
//! - [`phi21_numeric`]: adaptive truncation for `|q| < 1`, `|x| < 1`, with an
//!   optional geometric tail certificate;
//! - [`phi21_terminating`]: the shared finite-sum kernel, generic over the
//!   scalar kind.

mod closed_form;

pub use closed_form::{closed_form_eval, Bindings, ClosedFormExpr, IntPoly, Literal, PochLen};

use crate::error::{Error, Result};
use crate::exact_arith::{ApproxScalar, ExactScalar, Scalar};

/// Largest `r` tried when looking for an upper parameter equal to `q^{-r}`.
pub const DEFAULT_TERMINATION_BOUND: usize = 64;

/// Consecutive growing terms tolerated before giving up on convergence.
const GROWTH_LIMIT: usize = 32;
const MAX_TERMS: usize = 200_000;

/// Parameters of `₂φ₁(a, b; c; q, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Phi21Params<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub q: S,
    pub x: S,
}

impl<S: Scalar> Phi21Params<S> {
    pub fn new(a: S, b: S, c: S, q: S, x: S) -> Self {
        Phi21Params { a, b, c, q, x }
    }

    pub fn swapped(&self) -> Self {
        Phi21Params { a: self.b.clone(), b: self.a.clone(), ..self.clone() }
    }
}

impl Phi21Params<ExactScalar> {
    pub fn to_approx(&self) -> Phi21Params<ApproxScalar> {
        self.to_approx_prec(crate::exact_arith::default_precision())
    }

    pub fn to_approx_prec(&self, prec: usize) -> Phi21Params<ApproxScalar> {
        let f = |v: &ExactScalar| ApproxScalar::from_exact_prec(v, prec);
        Phi21Params { a: f(&self.a), b: f(&self.b), c: f(&self.c), q: f(&self.q), x: f(&self.x) }
    }
}

#[derive(Clone, Debug)]
pub struct SeriesValue<S> {
    pub value: S,
    pub terms_used: usize,
    pub terminated: bool,
    pub certified: bool,
}

/// `(base; q)_count = ∏_{j<count} (1 - base·q^j)`.
pub fn qpoch_finite<S: Scalar>(base: &S, q: &S, count: usize) -> S {
    let one = S::one();
    let mut acc = S::one();
    let mut t = base.clone();
    for _ in 0..count {
        acc = acc.mul(&one.sub(&t));
        t = t.mul(q);
    }
    acc
}

/// `(base; q)_∞` truncated once the tail factor is provably within `tol`.
///
/// With partial product `P_M = ∏_{j<M}`, the remaining factor satisfies
/// `|∏_{j≥M}(1 - base q^j) - 1| ≤ exp(|base| |q|^M / (1 - |q|)) - 1`.
pub fn qpoch_infinite(base: &ApproxScalar, q: &ApproxScalar, tol: f64) -> Result<SeriesValue<ApproxScalar>> {
    let qa = q.abs_f64() + q.err;
    if qa >= 1.0 {
        return Err(Error::InvalidDomain(format!("|q| = {qa} >= 1 in infinite product")));
    }
    let ba = base.abs_f64() + base.err;
    let one = ApproxScalar::one();
    let mut partial = ApproxScalar::one();
    let mut t = base.clone();
    let mut qm = 1.0f64;
    for m in 0..MAX_TERMS {
        let tail = (ba * qm / (1.0 - qa)).exp_m1();
        let bound = tail * (partial.abs_f64() + partial.err);
        if bound <= tol {
            let certified = partial.certified;
            let value = partial.with_extra_err(bound);
            return Ok(SeriesValue { value, terms_used: m, terminated: tail == 0.0, certified });
        }
        partial = partial.mul(&one.sub(&t));
        t = t.mul(q);
        qm *= qa;
    }
    Err(Error::NoConvergence { terms: MAX_TERMS })
}

/// Smallest `r ≤ bound` with `v·q^r = 1`, tested exactly.
pub fn termination_index(v: &ExactScalar, q: &ExactScalar, bound: usize) -> Option<usize> {
    let mut t = v.clone();
    for r in 0..=bound {
        if t.is_one() {
            return Some(r);
        }
        t = t.mul(q);
    }
    None
}

/// Finite sum `Σ_{i=0}^{r} (a;q)_i (b;q)_i / ((q;q)_i (c;q)_i) x^i`, building
/// the denominators incrementally and failing on the first vanishing factor.
pub fn phi21_terminating<S: Scalar>(p: &Phi21Params<S>, r: usize) -> Result<SeriesValue<S>> {
    let one = S::one();
    let mut term = S::one();
    let mut sum = S::one();
    let (mut aq, mut bq, mut cq) = (p.a.clone(), p.b.clone(), p.c.clone());
    let mut qi1 = p.q.clone();
    for i in 0..r {
        let num = one.sub(&aq).mul(&one.sub(&bq)).mul(&p.x);
        let den_q = one.sub(&qi1);
        let den_c = one.sub(&cq);
        if den_q.is_zero() {
            return Err(Error::ZeroDenominator(format!("(q;q)_{} vanishes", i + 1)));
        }
        if den_c.is_zero() {
            return Err(Error::ZeroDenominator(format!("(c;q)_{} vanishes", i + 1)));
        }
        term = term.mul(&num).div(&den_q.mul(&den_c))?;
        sum = sum.add(&term);
        aq = aq.mul(&p.q);
        bq = bq.mul(&p.q);
        cq = cq.mul(&p.q);
        qi1 = qi1.mul(&p.q);
    }
    Ok(SeriesValue { value: sum, terms_used: r + 1, terminated: true, certified: true })
}

/// Exact evaluation of a terminating `₂φ₁`, including the exceptional case
/// `c = q^{-s}` with `s > r`.
pub fn phi21_exact(p: &Phi21Params<ExactScalar>) -> Result<SeriesValue<ExactScalar>> {
    phi21_exact_with_bound(p, DEFAULT_TERMINATION_BOUND)
}

pub fn phi21_exact_with_bound(p: &Phi21Params<ExactScalar>, bound: usize) -> Result<SeriesValue<ExactScalar>> {
    let ra = termination_index(&p.a, &p.q, bound);
    let rb = termination_index(&p.b, &p.q, bound);
    let r = match (ra, rb) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Err(Error::NotTerminating { bound }),
    };
    phi21_terminating(p, r)
}

fn numeric_termination(v: &ApproxScalar, q: &ApproxScalar, bound: usize) -> Option<usize> {
    let one = ApproxScalar::one();
    let floor = 2f64.powi(-(v.precision() as i32 - 16));
    let mut t = v.clone();
    for r in 0..=bound {
        let gap = one.sub(&t);
        if gap.abs_f64() <= (4.0 * gap.err).max(floor * t.abs_f64().max(1.0)) {
            return Some(r);
        }
        t = t.mul(q);
    }
    None
}

/// Adaptive numeric evaluation for `|q| < 1`.
///
/// Summation stops once three consecutive terms are each below
/// `tol·(|partial| + 1)`. The result is certified when the term ratio is
/// bounded by some `ρ < 1` from the stopping index on; the tail bound
/// `|t_I| ρ/(1-ρ)` is then added to the error.
pub fn phi21_numeric(p: &Phi21Params<ApproxScalar>, tol: f64) -> Result<SeriesValue<ApproxScalar>> {
    let qa = p.q.abs_f64();
    if qa >= 1.0 {
        return Err(Error::InvalidDomain(format!("|q| = {qa} >= 1")));
    }
    let ra = numeric_termination(&p.a, &p.q, DEFAULT_TERMINATION_BOUND);
    let rb = numeric_termination(&p.b, &p.q, DEFAULT_TERMINATION_BOUND);
    if let Some(r) = ra.into_iter().chain(rb).min() {
        return phi21_terminating(p, r);
    }
    let xa = p.x.abs_f64();
    if xa >= 1.0 {
        return Err(Error::InvalidDomain(format!("|x| = {xa} >= 1 for a non-terminating series")));
    }

    let one = ApproxScalar::one();
    let mut term = ApproxScalar::one();
    let mut sum = ApproxScalar::one();
    let (mut aq, mut bq, mut cq) = (p.a.clone(), p.b.clone(), p.c.clone());
    let mut qi1 = p.q.clone();
    let mut small_run = 0usize;
    let mut growth_run = 0usize;
    let mut qpow = 1.0f64; // |q|^i for the index of the current term
    for i in 0..MAX_TERMS {
        let num = one.sub(&aq).mul(&one.sub(&bq)).mul(&p.x);
        let den = one.sub(&qi1).mul(&one.sub(&cq));
        if den.is_zero() {
            return Err(Error::ZeroDenominator(format!("(c;q)_{} vanishes", i + 1)));
        }
        let next = term.mul(&num).div(&den)?;
        let grew = next.abs_f64() > term.abs_f64();
        growth_run = if grew { growth_run + 1 } else { 0 };
        if growth_run >= GROWTH_LIMIT {
            return Err(Error::NoConvergence { terms: i + 2 });
        }
        term = next;
        sum = sum.add(&term);
        qpow *= qa;
        let small = term.abs_f64() < tol * (sum.abs_f64() + 1.0);
        small_run = if small { small_run + 1 } else { 0 };
        aq = aq.mul(&p.q);
        bq = bq.mul(&p.q);
        cq = cq.mul(&p.q);
        qi1 = qi1.mul(&p.q);
        if small_run >= 3 {
            // term has index i+1; ratio bound over all later indices j ≥ i+1
            let k = qpow;
            let numb = (1.0 + p.a.abs_f64() * k) * (1.0 + p.b.abs_f64() * k) * xa;
            let denb = (1.0 - k * qa) * (1.0 - p.c.abs_f64() * k);
            let terms_used = i + 2;
            if denb > 0.0 && numb / denb < 1.0 {
                let rho = numb / denb;
                let tail = (term.abs_f64() + term.err) * rho / (1.0 - rho);
                let certified = sum.certified;
                let value = sum.with_extra_err(tail);
                return Ok(SeriesValue { value, terms_used, terminated: false, certified });
            }
            let value = sum.with_extra_err(term.abs_f64() * 3.0).uncertified();
            return Ok(SeriesValue { value, terms_used, terminated: false, certified: false });
        }
    }
    Err(Error::NoConvergence { terms: MAX_TERMS })
}
