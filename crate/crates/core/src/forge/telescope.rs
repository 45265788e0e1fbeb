//! The telescoped equation
//! `φ(a,b,c,x) = φ(aq^{kN}, bq^{lN}, cq^{mN}, xq^{nN}) / (R^(1) ... R^(N))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ApproxScalar, ExactScalar};
use crate::qseries::{phi21_exact, phi21_numeric, Phi21Params};
use crate::relations::{relation_for, ParamFamily, ShiftVector, ThreeTermRelation};

use super::families::{product_r_value, FamilyPoint};

/// A series value, exact when the series terminates.
#[derive(Clone, Debug)]
pub enum PhiValue {
    Exact(ExactScalar),
    Approx(ApproxScalar),
}

impl PhiValue {
    fn approx(&self) -> ApproxScalar {
        match self {
            PhiValue::Exact(v) => ApproxScalar::from(v),
            PhiValue::Approx(v) => v.clone(),
        }
    }

    fn text(&self) -> String {
        match self {
            PhiValue::Exact(v) => v.to_string(),
            PhiValue::Approx(v) => v.to_string(),
        }
    }
}

/// Exact value when `a` or `b` terminates the series, numeric otherwise.
pub fn phi_value(p: &Phi21Params<ExactScalar>, tol: f64) -> Result<PhiValue> {
    match phi21_exact(p) {
        Ok(v) => Ok(PhiValue::Exact(v.value)),
        Err(Error::NotTerminating { .. }) => Ok(PhiValue::Approx(phi21_numeric(&p.to_approx(), tol / 100.0)?.value)),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineStep {
    pub n: u32,
    pub lhs: String,
    pub product: String,
    pub telescoped: String,
    pub residual: f64,
    pub exact: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub shift: ShiftVector,
    pub family: String,
    pub n_max: u32,
    pub point: BTreeMap<String, String>,
    /// The base series is exactly 1; such an identity is reported, not
    /// counted as a finding.
    pub trivial: bool,
    pub steps: Vec<PipelineStep>,
}

impl PipelineRun {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }
}

/// The telescoped value at a single `N`: `φ(shifted) / ∏ R^(i)`, together
/// with the product.
pub fn telescoped_step(rel: &ThreeTermRelation, fam: &ParamFamily, pt: &FamilyPoint, n: u32, tol: f64) -> Result<(PhiValue, ExactScalar)> {
    let product = product_r_value(rel, fam, pt, n)?;
    let [a, b, c, x] = pt.params_at_step(fam, rel.shift, n + 1)?;
    let shifted = phi_value(&Phi21Params::new(a, b, c, pt.q.clone(), x), tol)?;
    if product.is_zero() {
        return Err(Error::ZeroDenominator(format!("R-product vanishes at N = {n}")));
    }
    let value = match shifted {
        PhiValue::Exact(v) => PhiValue::Exact(v.field_div(&product)?),
        PhiValue::Approx(v) => PhiValue::Approx(v.div(&ApproxScalar::from(&product))?),
    };
    Ok((value, product))
}

/// Point given as symbol values; `q` must be present and every free symbol
/// of the family bound.
pub fn family_point(fam: &ParamFamily, point: &BTreeMap<String, ExactScalar>) -> Result<FamilyPoint> {
    let get = |s: &str| point.get(s).cloned().ok_or_else(|| Error::UnboundSymbol(s.to_string()));
    let free = fam.free_symbols.iter().map(|s| get(s)).collect::<Result<Vec<_>>>()?;
    Ok(FamilyPoint { free, q: get("q")? })
}

/// Checks the telescoped equation for `N = 1..=n_max`; exact when both
/// series terminate, otherwise within `tol` plus error bounds.
pub fn telescoped_check(shift: ShiftVector, fam: &ParamFamily, n_max: u32, point: &BTreeMap<String, ExactScalar>, tol: f64) -> Result<PipelineRun> {
    let rel = relation_for(shift)?;
    telescoped_check_with(&rel, fam, n_max, point, tol)
}

pub fn telescoped_check_with(
    rel: &ThreeTermRelation,
    fam: &ParamFamily,
    n_max: u32,
    point: &BTreeMap<String, ExactScalar>,
    tol: f64,
) -> Result<PipelineRun> {
    let pt = family_point(fam, point)?;
    let [a, b, c, x] = pt.params_at_step(fam, rel.shift, 1)?;
    let lhs = phi_value(&Phi21Params::new(a, b, c, pt.q.clone(), x), tol)?;
    let mut steps = Vec::new();
    for n in 1..=n_max {
        let (tel, product) = telescoped_step(rel, fam, &pt, n, tol)?;
        let (residual, exact, passed) = match (&lhs, &tel) {
            (PhiValue::Exact(l), PhiValue::Exact(t)) => {
                let d = l.sub(t);
                (d.abs_f64(), true, d.is_zero())
            }
            _ => {
                let (l, t) = (lhs.approx(), tel.approx());
                let d = l.sub(&t).abs_f64();
                (d, false, d + l.err + t.err <= tol)
            }
        };
        steps.push(PipelineStep { n, lhs: lhs.text(), product: product.to_string(), telescoped: tel.text(), residual, exact, passed });
    }
    Ok(PipelineRun {
        shift: rel.shift,
        family: fam.to_string(),
        n_max,
        point: point.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        trivial: matches!(&lhs, PhiValue::Exact(v) if v.is_one()),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;
    use crate::forge::families::{gauss_family, kummer_family};

    fn ex(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_rational(rat(n, d))
    }

    #[test]
    fn gauss_telescoping_numeric() {
        let point = BTreeMap::from([("a".into(), ex(3, 1)), ("b".into(), ex(5, 1)), ("c".into(), ex(1, 7)), ("q".into(), ex(1, 2))]);
        let run = telescoped_check(ShiftVector::new(0, 1, 1, 0), &gauss_family(), 5, &point, 1e-12).unwrap();
        assert_eq!(run.steps.len(), 5);
        assert!(run.passed(), "{run:?}");
    }

    #[test]
    fn kummer_telescoping_exact() {
        let q = ex(1, 2);
        let point = BTreeMap::from([("a".into(), q.pow(2).unwrap()), ("b".into(), q.pow(-6).unwrap()), ("q".into(), q)]);
        let run = telescoped_check(ShiftVector::new(1, 2, 1, -1), &kummer_family(), 3, &point, 0.0).unwrap();
        assert!(run.steps.iter().all(|s| s.exact && s.passed), "{run:?}");
    }

    #[test]
    fn zero_steps_is_consistent() {
        let point = BTreeMap::from([("a".into(), ex(3, 1)), ("b".into(), ex(5, 1)), ("c".into(), ex(1, 7)), ("q".into(), ex(1, 2))]);
        let run = telescoped_check(ShiftVector::new(0, 1, 1, 0), &gauss_family(), 0, &point, 1e-12).unwrap();
        assert!(run.steps.is_empty() && run.passed());
    }

    #[test]
    fn unit_sum_is_flagged() {
        // a = 1 stops the series after its constant term.
        let point = BTreeMap::from([("a".into(), ex(1, 1)), ("x".into(), ex(1, 5)), ("q".into(), ex(1, 2))]);
        let run = telescoped_check(ShiftVector::new(0, 0, 0, 2), &crate::forge::binomial_family(), 2, &point, 0.0).unwrap();
        assert!(run.trivial && run.passed());
    }
}
