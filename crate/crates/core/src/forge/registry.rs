//! The identity registry and two-sided verification.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ApproxScalar, ExactScalar, Scalar};
use crate::qseries::{closed_form_eval, phi21_exact, phi21_numeric, termination_index, Bindings, ClosedFormExpr, Phi21Params};
use crate::relations::ShiftVector;

use super::random_rational;

const BUILTIN: &str = include_str!("../../data/identities.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExactTerminating,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    AbsLtOne { expr: ClosedFormExpr },
    NonNegativeInt { symbol: String },
    PrimitiveRoot { symbol: String, order: u32 },
    NotOne { expr: ClosedFormExpr },
    Nonzero { expr: ClosedFormExpr },
}

/// Parameter slots of the left-hand `₂φ₁`; `q` is the bound symbol `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhsPattern {
    pub a: ClosedFormExpr,
    pub b: ClosedFormExpr,
    pub c: ClosedFormExpr,
    pub x: ClosedFormExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    #[serde(default)]
    pub title: String,
    /// Shift whose relation produces the identity, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftVector>,
    pub mode: Mode,
    pub int_symbols: Vec<String>,
    pub scalar_symbols: Vec<String>,
    pub lhs: LhsPattern,
    pub rhs: ClosedFormExpr,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    pub identities: Vec<IdentityRecord>,
}

impl Registry {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("identity registry: {e}")))
    }

    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::from_json(BUILTIN).expect("built-in registry is valid"))
    }

    pub fn get(&self, id: &str) -> Result<&IdentityRecord> {
        self.identities.iter().find(|r| r.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.identities.iter().map(|r| r.id.as_str())
    }
}

/// Record from the built-in registry.
pub fn identity(id: &str) -> Result<&'static IdentityRecord> {
    Registry::builtin().get(id)
}

fn abs_lt_one(v: &ExactScalar) -> bool {
    match v.as_rational() {
        Some(r) => r.abs() < num::BigRational::one(),
        None => v.abs_f64() < 1.0,
    }
}

fn is_primitive_root(v: &ExactScalar, order: u32) -> bool {
    let pw = |e: u32| v.pow(e as i64).map(|p| p.is_one()).unwrap_or(false);
    pw(order) && (1..order).filter(|d| order.is_multiple_of(*d)).all(|d| !pw(d))
}

impl IdentityRecord {
    /// Bindings completed with default roots of unity for unbound
    /// `primitive_root` symbols.
    pub fn complete_bindings(&self, bindings: &Bindings<ExactScalar>) -> Bindings<ExactScalar> {
        let mut out = bindings.clone();
        for c in &self.constraints {
            if let Constraint::PrimitiveRoot { symbol, order } = c {
                if !out.scalars.contains_key(symbol) {
                    out.scalars.insert(symbol.clone(), ExactScalar::zeta(*order));
                }
            }
        }
        out
    }

    /// Check every constraint; bindings should already be completed.
    pub fn check_constraints(&self, b: &Bindings<ExactScalar>) -> Result<()> {
        let fail = |what: String| Err(Error::ConstraintViolated(format!("{}: {what}", self.id)));
        for s in &self.int_symbols {
            if !b.ints.contains_key(s) {
                return Err(Error::UnboundSymbol(s.clone()));
            }
        }
        for s in &self.scalar_symbols {
            if !b.scalars.contains_key(s) && !b.ints.contains_key(s) {
                return Err(Error::UnboundSymbol(s.clone()));
            }
        }
        for c in &self.constraints {
            match c {
                Constraint::AbsLtOne { expr } => {
                    let v = closed_form_eval(expr, b, 0.0)?;
                    if !abs_lt_one(&v) {
                        return fail(format!("|{v}| < 1 required"));
                    }
                }
                Constraint::NonNegativeInt { symbol } => match b.ints.get(symbol) {
                    Some(n) if *n >= 0 => {}
                    Some(n) => return fail(format!("{symbol} = {n} must be non-negative")),
                    None => return Err(Error::UnboundSymbol(symbol.clone())),
                },
                Constraint::PrimitiveRoot { symbol, order } => {
                    let v = b.scalars.get(symbol).ok_or_else(|| Error::UnboundSymbol(symbol.clone()))?;
                    if !is_primitive_root(v, *order) {
                        return fail(format!("{symbol} = {v} is not a primitive {order}-th root of unity"));
                    }
                }
                Constraint::NotOne { expr } => {
                    if closed_form_eval(expr, b, 0.0)?.is_one() {
                        return fail("value 1 is excluded".into());
                    }
                }
                Constraint::Nonzero { expr } => {
                    if closed_form_eval(expr, b, 0.0)?.is_zero() {
                        return fail("value 0 is excluded".into());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lhs_params<S: Scalar>(&self, b: &Bindings<S>) -> Result<Phi21Params<S>> {
        let e = |x: &ClosedFormExpr| closed_form_eval(x, b, 0.0);
        let q = b.scalars.get("q").cloned().ok_or_else(|| Error::UnboundSymbol("q".into()))?;
        Ok(Phi21Params::new(e(&self.lhs.a)?, e(&self.lhs.b)?, e(&self.lhs.c)?, q, e(&self.lhs.x)?))
    }
}

/// Outcome of one two-sided evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    pub mode: Mode,
    pub lhs: String,
    pub rhs: String,
    pub abs_err: f64,
    /// Certified error bounds of both sides (zero in exact mode).
    pub err_bound: f64,
    pub terms_used: usize,
    pub passed: bool,
}

fn approx_bindings(b: &Bindings<ExactScalar>) -> Bindings<ApproxScalar> {
    Bindings {
        ints: b.ints.clone(),
        scalars: b.scalars.iter().map(|(k, v)| (k.clone(), ApproxScalar::from(v))).collect(),
    }
}

/// Evaluate both sides in the record's mode.
pub fn verify_identity(rec: &IdentityRecord, bindings: &Bindings<ExactScalar>, tol: f64) -> Result<IdentityCheck> {
    verify_identity_in(rec, bindings, tol, rec.mode)
}

/// Evaluate both sides in the given mode. Exact mode requires the series to
/// terminate; numeric mode passes when `|lhs - rhs|` plus both certified
/// error bounds is at most `tol`, refining the series tolerance while the
/// bound alone is what fails.
pub fn verify_identity_in(rec: &IdentityRecord, bindings: &Bindings<ExactScalar>, tol: f64, mode: Mode) -> Result<IdentityCheck> {
    let b = rec.complete_bindings(bindings);
    rec.check_constraints(&b)?;
    match mode {
        Mode::ExactTerminating => {
            let lhs = phi21_exact(&rec.lhs_params(&b)?)?;
            let rhs = closed_form_eval(&rec.rhs, &b, tol)?;
            let diff = lhs.value.sub(&rhs);
            Ok(IdentityCheck {
                id: rec.id.clone(),
                mode,
                lhs: lhs.value.to_string(),
                rhs: rhs.to_string(),
                abs_err: diff.abs_f64(),
                err_bound: 0.0,
                terms_used: lhs.terms_used,
                passed: diff.is_zero(),
            })
        }
        Mode::Numeric => {
            let ab = approx_bindings(&b);
            let params = rec.lhs_params(&ab)?;
            // Series stop on a relative criterion; large values need a finer
            // target before the absolute bound can be met.
            let mut series_tol = tol / 100.0;
            loop {
                let lhs = phi21_numeric(&params, series_tol)?;
                let rhs = closed_form_eval(&rec.rhs, &ab, series_tol)?;
                let abs_err = lhs.value.sub(&rhs).abs_f64();
                let err_bound = lhs.value.err + rhs.err;
                let passed = lhs.certified && abs_err + err_bound <= tol;
                if passed || abs_err > tol + err_bound || series_tol < tol * 1e-12 {
                    return Ok(IdentityCheck {
                        id: rec.id.clone(),
                        mode,
                        lhs: lhs.value.to_string(),
                        rhs: rhs.to_string(),
                        abs_err,
                        err_bound,
                        terms_used: lhs.terms_used,
                        passed,
                    });
                }
                series_tol *= 1e-4;
            }
        }
    }
}

/// Random admissible bindings for a numeric record: scalar symbols are
/// rationals of height at most 97 with `|q| <= 3/5`, resampled until the
/// constraints hold and neither side meets a vanishing denominator.
pub fn sample_bindings<R: Rng>(rec: &IdentityRecord, rng: &mut R, ints: &BTreeMap<String, i64>) -> Result<Bindings<ExactScalar>> {
    const ATTEMPTS: usize = 10_000;
    let q_max = num::BigRational::new(3.into(), 5.into());
    for _ in 0..ATTEMPTS {
        let mut b = Bindings { ints: ints.clone(), scalars: BTreeMap::new() };
        for s in &rec.scalar_symbols {
            let v = loop {
                let v = random_rational(rng, 97);
                if s != "q" || v.abs() <= q_max {
                    break v;
                }
            };
            b.scalars.insert(s.clone(), ExactScalar::from_rational(v));
        }
        let b = rec.complete_bindings(&b);
        if rec.check_constraints(&b).is_err() {
            continue;
        }
        let Ok(p) = rec.lhs_params(&b) else { continue };
        // (c; q)_i must not vanish unless the series terminates first.
        if termination_index(&p.c, &p.q, 256).is_some() {
            continue;
        }
        if closed_form_eval(&rec.rhs, &approx_bindings(&b), 1e-20).is_err() {
            continue;
        }
        return Ok(b);
    }
    Err(Error::SamplingExhausted { attempts: ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;

    fn ex(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_rational(rat(n, d))
    }

    #[test]
    fn builtin_registry_has_nine_records() {
        let ids: Vec<&str> = Registry::builtin().ids().collect();
        assert_eq!(ids, ["qbinom", "qbinom2", "qgauss", "qkummer", "sv1", "sv2", "sv3", "sv4", "sv5"]);
        assert!(matches!(identity("sv9"), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn sv1_small_case() {
        let b = Bindings::default().with_int("M", 0).with_int("N", 1).with_scalar("q", ex(1, 2));
        let r = verify_identity(identity("sv1").unwrap(), &b, 0.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.lhs, "5/7");
    }

    #[test]
    fn sv4_at_zero_is_one() {
        let b = Bindings::default().with_int("N", 0).with_scalar("q", ex(1, 2));
        let r = verify_identity(identity("sv4").unwrap(), &b, 0.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.lhs, "1");
    }

    #[test]
    fn kummer_numeric_point() {
        let b = Bindings::default().with_scalar("a", ex(3, 1)).with_scalar("b", ex(1, 5)).with_scalar("q", ex(1, 2));
        let r = verify_identity(identity("qkummer").unwrap(), &b, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn constraint_violations() {
        let rec = identity("qbinom").unwrap();
        let b = Bindings::default().with_scalar("a", ex(1, 3)).with_scalar("x", ex(3, 2)).with_scalar("q", ex(1, 2));
        assert!(matches!(verify_identity(rec, &b, 1e-12), Err(Error::ConstraintViolated(_))));
        let sv5 = identity("sv5").unwrap();
        let b = Bindings::default().with_int("N", 2).with_scalar("a", ex(1, 1)).with_scalar("q", ex(1, 2));
        assert!(matches!(verify_identity(sv5, &b, 0.0), Err(Error::ConstraintViolated(_))));
        let sv4 = identity("sv4").unwrap();
        let b = Bindings::default().with_int("N", 2).with_scalar("w", ExactScalar::zeta(6)).with_scalar("q", ex(1, 2));
        assert!(matches!(verify_identity(sv4, &b, 0.0), Err(Error::ConstraintViolated(_))));
        let b = Bindings::default().with_int("N", -1).with_int("M", 0).with_scalar("q", ex(1, 2));
        assert!(matches!(verify_identity(identity("sv1").unwrap(), &b, 0.0), Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn registry_round_trip() {
        let reg = Registry::builtin();
        let text = serde_json::to_string(reg).unwrap();
        assert_eq!(&Registry::from_json(&text).unwrap(), reg);
    }
}
