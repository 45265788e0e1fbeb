//! Three-term relations
//!
//! ```text
//! φ(aq^k, bq^l; cq^m; q, xq^n) = Q·φ(aq, bq; cq; q, x) + R·φ(a, b; c; q, x)
//! ```
//!
//! with `Q`, `R` rational in `a, b, c, q, x`, plus the parameter families they
//! are evaluated along.

mod derive;
mod poly;
mod ratfunc;
mod table;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use derive::{qr_derive_with, DeriveOptions};
pub use poly::{symbol_index, Exps, MultiPoly, NVARS, SYMBOLS};
pub use ratfunc::{parse_rational_function, RationalFunction, RationalFunctionJson};
pub use table::{qr_lookup, TABLE_SHIFTS};

use crate::error::{Error, Result};
use crate::exact_arith::rational::rat;
use crate::exact_arith::{ApproxScalar, ExactScalar, Scalar};
use crate::qseries::{phi21_numeric, Phi21Params};

pub const DEFAULT_DEGREE_BUDGET: u32 = 8;

/// Residual bound for the numeric witness of a relation.
pub const RESIDUAL_TOL: f64 = 1e-20;

/// Working precision (bits) for exact-point residual checks; large `Q`, `R`
/// values cancel against each other, so 113 bits is not always enough.
pub const RESIDUAL_PRECISION: usize = 192;

pub(crate) const SYM_A: usize = 0;
pub(crate) const SYM_B: usize = 1;
pub(crate) const SYM_C: usize = 2;
pub(crate) const SYM_Q: usize = 3;
pub(crate) const SYM_X: usize = 4;
pub(crate) const SYM_W: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct ShiftVector {
    pub k: i64,
    pub l: i64,
    pub m: i64,
    pub n: i64,
}

impl ShiftVector {
    pub const fn new(k: i64, l: i64, m: i64, n: i64) -> Self {
        ShiftVector { k, l, m, n }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::new(0, 0, 0, 0)
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.k, self.l, self.m, self.n]
    }

    /// `k + l - m + n`; relations with this equal to zero have `c - abx` in
    /// the numerator of `Q`.
    pub fn balance(&self) -> i64 {
        self.k + self.l - self.m + self.n
    }
}

impl From<[i64; 4]> for ShiftVector {
    fn from(v: [i64; 4]) -> Self {
        ShiftVector::new(v[0], v[1], v[2], v[3])
    }
}

impl From<ShiftVector> for [i64; 4] {
    fn from(s: ShiftVector) -> Self {
        s.as_array()
    }
}

impl fmt::Display for ShiftVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k, self.l, self.m, self.n)
    }
}

impl FromStr for ShiftVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("shift vector needs four integers: `{s}`")));
        }
        let mut v = [0i64; 4];
        for (slot, p) in v.iter_mut().zip(parts) {
            *slot = p.replace('−', "-").parse().map_err(|_| Error::Parse(format!("bad integer `{p}` in `{s}`")))?;
        }
        Ok(v.into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeTermRelation {
    pub shift: ShiftVector,
    #[serde(rename = "Q")]
    pub q: RationalFunction,
    #[serde(rename = "R")]
    pub r: RationalFunction,
}

impl ThreeTermRelation {
    /// `Q` and `R` at an exact point.
    pub fn eval<S: Scalar>(&self, vals: &[Option<S>; NVARS]) -> Result<(S, S)> {
        Ok((self.q.eval(vals)?, self.r.eval(vals)?))
    }
}

/// Derive `(Q, R)` for `shift` with the given x-degree budget.
pub fn qr_derive(shift: ShiftVector, degree_budget: u32) -> Result<ThreeTermRelation> {
    qr_derive_with(shift, &DeriveOptions { degree_budget, ..DeriveOptions::default() })
}

fn cache() -> &'static Mutex<HashMap<ShiftVector, Arc<ThreeTermRelation>>> {
    static CACHE: OnceLock<Mutex<HashMap<ShiftVector, Arc<ThreeTermRelation>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Tabulated relation when available, otherwise a derived one; memoized.
pub fn relation_for(shift: ShiftVector) -> Result<Arc<ThreeTermRelation>> {
    if let Some(r) = cache().lock().expect("relation cache").get(&shift) {
        return Ok(r.clone());
    }
    let rel = match qr_lookup(shift) {
        Ok(r) => r,
        Err(Error::NotInTable(_)) => qr_derive(shift, DEFAULT_DEGREE_BUDGET)?,
        Err(e) => return Err(e),
    };
    let rel = Arc::new(rel);
    cache().lock().expect("relation cache").insert(shift, rel.clone());
    Ok(rel)
}

/// Symbol values for the parameters of a series.
pub fn point_of<S: Scalar>(p: &Phi21Params<S>) -> [Option<S>; NVARS] {
    let mut v: [Option<S>; NVARS] = Default::default();
    v[SYM_A] = Some(p.a.clone());
    v[SYM_B] = Some(p.b.clone());
    v[SYM_C] = Some(p.c.clone());
    v[SYM_Q] = Some(p.q.clone());
    v[SYM_X] = Some(p.x.clone());
    v
}

pub fn eval_rational_function<S: Scalar>(f: &RationalFunction, point: &[Option<S>; NVARS]) -> Result<S> {
    f.eval(point)
}

fn shifted_params<S: Scalar>(p: &Phi21Params<S>, s: ShiftVector) -> Result<Phi21Params<S>> {
    let sh = |v: &S, k: i64| -> Result<S> { Ok(v.mul(&p.q.pow(k)?)) };
    Ok(Phi21Params::new(sh(&p.a, s.k)?, sh(&p.b, s.l)?, sh(&p.c, s.m)?, p.q.clone(), sh(&p.x, s.n)?))
}

/// `|φ_shifted - Q·φ_up - R·φ_base|` at a numeric point, each series summed
/// to `tol/10`.
pub fn relation_residual(rel: &ThreeTermRelation, point: &Phi21Params<ApproxScalar>, tol: f64) -> Result<f64> {
    let (qv, rv) = rel.eval(&point_of(point))?;
    residual_with(rel.shift, point, &qv, &rv, tol)
}

/// As [`relation_residual`], with `Q` and `R` evaluated exactly first.
pub fn relation_residual_exact(rel: &ThreeTermRelation, point: &Phi21Params<ExactScalar>, tol: f64) -> Result<f64> {
    let (qv, rv) = rel.eval(&point_of(point))?;
    let prec = RESIDUAL_PRECISION.max(crate::exact_arith::default_precision());
    let to = |v: &ExactScalar| ApproxScalar::from_exact_prec(v, prec);
    residual_with(rel.shift, &point.to_approx_prec(prec), &to(&qv), &to(&rv), tol)
}

fn residual_with(shift: ShiftVector, point: &Phi21Params<ApproxScalar>, qv: &ApproxScalar, rv: &ApproxScalar, tol: f64) -> Result<f64> {
    let t = tol / 10.0;
    let shifted = phi21_numeric(&shifted_params(point, shift)?, t)?.value;
    let up = phi21_numeric(&shifted_params(point, ShiftVector::new(1, 1, 1, 0))?, t)?.value;
    let base = phi21_numeric(point, t)?.value;
    Ok(shifted.sub(&qv.mul(&up)).sub(&rv.mul(&base)).abs_f64())
}

/// Random exact point with coordinates in `(0, 1/2)`, `x` scaled so every
/// series in the relation converges.
pub(crate) fn random_residual_point(rng: &mut ChaCha8Rng, shift: ShiftVector) -> Phi21Params<ExactScalar> {
    let mut pick = || {
        let den = rng.gen_range(3..=29i64);
        let num = rng.gen_range(1..=(den - 1) / 2);
        ExactScalar::from_rational(rat(num, den))
    };
    let (a, b, c, q, x) = (pick(), pick(), pick(), pick(), pick());
    let x = x.mul(&q.pow(0.max(-shift.n)).expect("q is nonzero"));
    Phi21Params::new(a, b, c, q, x)
}

/// Check the residual invariant at `count` random points.
pub(crate) fn check_residuals(rel: &ThreeTermRelation, count: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let mut done = 0;
    let mut attempts = 0;
    while done < count {
        attempts += 1;
        if attempts > 20 * count {
            return Err(Error::SamplingExhausted { attempts });
        }
        let pt = random_residual_point(&mut rng, rel.shift);
        match relation_residual_exact(rel, &pt, 1e-45) {
            Ok(r) if r < RESIDUAL_TOL => done += 1,
            Ok(r) => {
                return Err(Error::VerificationFailed(format!("residual {r:e} for {} at a={} b={} c={} q={} x={}", rel.shift, pt.a, pt.b, pt.c, pt.q, pt.x)))
            }
            Err(Error::ZeroDenominator(_)) | Err(Error::DivisionByZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Assignment of `(a, b, c, x)` to rational functions of the free symbols
/// and `q`. When `root_order` is set, the symbol `w` denotes a primitive
/// root of unity of that order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamFamily {
    pub free_symbols: Vec<String>,
    pub a: RationalFunction,
    pub b: RationalFunction,
    pub c: RationalFunction,
    pub x: RationalFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_order: Option<u32>,
}

impl ParamFamily {
    /// Build a family, rejecting the excluded degenerate shapes
    /// `(1,b,c,x)`, `(a,1,c,x)`, `(0,b,0,x)`, `(a,0,0,x)`, `(a,b,0,0)`,
    /// `(a,b,c,0)`.
    pub fn new(free_symbols: &[&str], assignment: [RationalFunction; 4], root_order: Option<u32>) -> Result<Self> {
        let [a, b, c, x] = assignment;
        let fam = ParamFamily { free_symbols: free_symbols.iter().map(|s| s.to_string()).collect(), a, b, c, x, root_order };
        fam.validate()?;
        Ok(fam)
    }

    /// Parse each slot with [`parse_rational_function`].
    pub fn parse(free_symbols: &[&str], slots: [&str; 4], root_order: Option<u32>) -> Result<Self> {
        let [a, b, c, x] = slots;
        Self::new(
            free_symbols,
            [parse_rational_function(a)?, parse_rational_function(b)?, parse_rational_function(c)?, parse_rational_function(x)?],
            root_order,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let one = RationalFunction::one();
        let deg = |what: &str| Err(Error::DegenerateFamily(format!("{what} is excluded")));
        if self.a == one {
            return deg("a = 1");
        }
        if self.b == one {
            return deg("b = 1");
        }
        if self.x.is_zero() {
            return deg("x = 0");
        }
        if self.c.is_zero() && (self.a.is_zero() || self.b.is_zero()) {
            return deg("a or b = 0 together with c = 0");
        }
        let mut allowed: Vec<usize> = vec![SYM_Q];
        for s in &self.free_symbols {
            let i = symbol_index(s)?;
            if i == SYM_Q || i == SYM_W {
                return Err(Error::Parse(format!("`{s}` cannot be a free symbol")));
            }
            allowed.push(i);
        }
        if self.root_order.is_some() {
            allowed.push(SYM_W);
        }
        for f in self.slots() {
            for i in 0..NVARS {
                if f.uses(i) && !allowed.contains(&i) {
                    return Err(Error::UnboundSymbol(format!("`{}` in {f} is not a free symbol", SYMBOLS[i])));
                }
            }
        }
        Ok(())
    }

    pub fn slots(&self) -> [&RationalFunction; 4] {
        [&self.a, &self.b, &self.c, &self.x]
    }

    /// Evaluate `(a, b, c, x)` given values of the free symbols and `q`.
    pub fn eval<S: Scalar>(&self, free: &[S], q: &S) -> Result<[S; 4]> {
        if free.len() != self.free_symbols.len() {
            return Err(Error::InvalidDomain(format!("expected {} free values", self.free_symbols.len())));
        }
        let mut vals: [Option<S>; NVARS] = Default::default();
        for (s, v) in self.free_symbols.iter().zip(free) {
            vals[symbol_index(s)?] = Some(v.clone());
        }
        vals[SYM_Q] = Some(q.clone());
        if let Some(l) = self.root_order {
            vals[SYM_W] = Some(S::from_exact(&ExactScalar::zeta(l)));
        }
        Ok([self.a.eval(&vals)?, self.b.eval(&vals)?, self.c.eval(&vals)?, self.x.eval(&vals)?])
    }

    /// Substitute the family into a function of `(a, b, c, q, x)`.
    pub fn substitute_into(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let mut subs: [RationalFunction; NVARS] = std::array::from_fn(RationalFunction::var);
        subs[SYM_A] = self.a.clone();
        subs[SYM_B] = self.b.clone();
        subs[SYM_C] = self.c.clone();
        subs[SYM_X] = self.x.clone();
        f.substitute(&subs)
    }
}

impl fmt::Display for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.x)?;
        if let Some(l) = self.root_order {
            write!(f, " with w = primitive {l}-th root of unity")?;
        }
        Ok(())
    }
}

/// `(a_N, b_N, c_N, x_N) = (aq^{k(N-1)}, bq^{l(N-1)}, cq^{m(N-1)}, xq^{n(N-1)})`.
pub fn shift_params(fam: &ParamFamily, shift: ShiftVector, step: u32) -> ParamFamily {
    let e = step as i64 - 1;
    let q = RationalFunction::sym("q");
    let scale = |f: &RationalFunction, k: i64| {
        if k * e == 0 {
            f.clone()
        } else {
            f.mul(&q.pow((k * e) as i32).expect("q is nonzero"))
        }
    };
    ParamFamily {
        free_symbols: fam.free_symbols.clone(),
        a: scale(&fam.a, shift.k),
        b: scale(&fam.b, shift.l),
        c: scale(&fam.c, shift.m),
        x: scale(&fam.x, shift.n),
        root_order: fam.root_order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RationalFunction {
        parse_rational_function(s).unwrap()
    }

    #[test]
    fn shift_text() {
        assert_eq!("1,2,1,-1".parse::<ShiftVector>().unwrap(), ShiftVector::new(1, 2, 1, -1));
        assert_eq!("(0, 3, 3, 0)".parse::<ShiftVector>().unwrap(), ShiftVector::new(0, 3, 3, 0));
        assert!("1,2,3".parse::<ShiftVector>().is_err());
        assert_eq!(serde_json::to_string(&ShiftVector::new(1, 2, 1, -1)).unwrap(), "[1,2,1,-1]");
    }

    #[test]
    fn family_exclusions() {
        let ok = ParamFamily::parse(&["a", "b"], ["a", "b", "b*q/a", "-q/a"], None);
        assert!(ok.is_ok());
        for slots in [["1", "b", "c", "x"], ["a", "1", "c", "x"], ["0", "b", "0", "x"], ["a", "0", "0", "x"], ["a", "b", "0", "0"], ["a", "b", "c", "0"]] {
            let r = ParamFamily::parse(&["a", "b", "c", "x"], slots, None);
            assert!(matches!(r, Err(Error::DegenerateFamily(_))), "{slots:?}");
        }
        assert!(ParamFamily::parse(&["a"], ["a", "b", "c", "x"], None).is_err());
    }

    #[test]
    fn shifting_families() {
        let fam = ParamFamily::parse(&["a", "b"], ["a", "b", "b*q/a", "-q/a"], None).unwrap();
        assert_eq!(shift_params(&fam, ShiftVector::new(1, 2, 1, -1), 1), fam);
        let f2 = shift_params(&fam, ShiftVector::new(1, 2, 1, -1), 2);
        assert_eq!([f2.a, f2.b, f2.c, f2.x], [rf("a*q"), rf("b*q^2"), rf("b*q^2/a"), rf("-1/a")]);
        let g = ParamFamily::parse(&["a", "x"], ["a", "-a", "-q", "x"], None).unwrap();
        let g3 = shift_params(&g, ShiftVector::new(0, 0, 0, 2), 3);
        assert_eq!([g3.a, g3.b, g3.c, g3.x], [rf("a"), rf("-a"), rf("-q"), rf("x*q^4")]);
    }

    #[test]
    fn family_eval_with_root_of_unity() {
        let fam = ParamFamily::parse(&["b"], ["w*q", "b", "w*b", "1"], Some(3)).unwrap();
        let v = fam.eval(&[ExactScalar::from_int(2)], &ExactScalar::from_rational(rat(1, 2))).unwrap();
        assert_eq!(v[0], ExactScalar::zeta(3).scale(&rat(1, 2)));
        assert_eq!(v[2], ExactScalar::zeta(3).scale(&rat(2, 1)));
    }

    #[test]
    fn residual_controls() {
        let rel = qr_lookup(ShiftVector::new(0, 1, 1, 0)).unwrap();
        let ap = |n, d| ApproxScalar::from_rational(&rat(n, d));
        let pt = Phi21Params::new(ap(1, 3), ap(1, 5), ap(1, 7), ap(1, 2), ap(1, 4));
        assert!(relation_residual(&rel, &pt, 1e-30).unwrap() < 1e-12);
        let bad = ThreeTermRelation { q: rel.q.add(&RationalFunction::one()), ..rel.clone() };
        assert!(relation_residual(&bad, &pt, 1e-30).unwrap() > 0.1);
        let rel2 = qr_lookup(ShiftVector::new(0, 0, 0, 2)).unwrap();
        assert!(relation_residual(&rel2, &pt, 1e-30).unwrap() < 1e-12);
    }
}
