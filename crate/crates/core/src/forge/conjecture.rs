//! The coefficient-comparison oracle for the `a`-generalized root-of-unity
//! sum, and checks of the families predicted for general shift patterns.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::rational::rat;
use crate::exact_arith::ExactScalar;
use crate::qseries::{qpoch_finite, Bindings};
use crate::relations::{qr_derive, MultiPoly, ParamFamily, RationalFunction, ShiftVector, ThreeTermRelation, DEFAULT_DEGREE_BUDGET};

use super::families::{binomial_family, check_family_with, gauss_family, kummer_family, root_of_unity_family, FamilyPoint};
use super::registry::{identity, verify_identity};
use super::telescope::{telescoped_check_with, telescoped_step, PhiValue};

fn ex(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_rational(rat(n, d))
}

/// `(1 - a^{N+1}) / (1 - a)`.
fn geometric(a: &ExactScalar, n: u32) -> Result<ExactScalar> {
    let one = ExactScalar::one();
    one.sub(&a.pow(n as i64 + 1)?).field_div(&one.sub(a))
}

/// Coefficient of `x^N` in `(axq;q)_∞/(x;q)_∞ · (xq;q)_∞/(ax;q)_∞`, each
/// factor expanded by the q-binomial theorem.
fn cauchy_coefficient(a: &ExactScalar, q: &ExactScalar, n: u32) -> Result<ExactScalar> {
    let n = n as usize;
    let aq = a.mul(q);
    let q_over_a = q.field_div(a)?;
    let mut sum = ExactScalar::zero();
    for i in 0..=n {
        let left = qpoch_finite(&aq, q, i).field_div(&qpoch_finite(q, q, i))?;
        let right = qpoch_finite(&q_over_a, q, n - i).field_div(&qpoch_finite(q, q, n - i))?;
        sum = sum.add(&left.mul(&right).mul(&a.pow((n - i) as i64)?));
    }
    Ok(sum)
}

/// The same coefficient after the reflection `(q/a;q)_{N-i}` to
/// `(q^{-N};q)_i (aq^{-N};q)_N / ((aq^{-N};q)_i (q^{-N};q)_N)`, written with
/// `(aq^{-N};q)_N / (aq^{-N};q)_i = (aq^{i-N};q)_{N-i}`.
fn reflected_sum(a: &ExactScalar, q: &ExactScalar, n: u32) -> Result<ExactScalar> {
    let n = n as usize;
    let qn = q.pow(-(n as i64))?;
    let full = qpoch_finite(&qn, q, n);
    let mut sum = ExactScalar::zero();
    for i in 0..=n {
        let num = qpoch_finite(&a.mul(q), q, i).mul(&qpoch_finite(&qn, q, i)).mul(&qpoch_finite(&a.mul(&q.pow(i as i64 - n as i64)?), q, n - i));
        sum = sum.add(&num.field_div(&qpoch_finite(q, q, i).mul(&full))?);
    }
    Ok(sum)
}

/// For every `N <= n_max` and every `q`, the Cauchy-product coefficient,
/// its reflected form and `Σ_{j<=N} a^j` all equal `(1 - a^{N+1})/(1 - a)`.
pub fn sv5_cauchy_check(a: &ExactScalar, n_max: u32, qs: &[ExactScalar]) -> Result<bool> {
    if a.is_one() {
        return Err(Error::DegenerateParameter("a = 1 makes 1 - a vanish".into()));
    }
    if a.is_zero() {
        return Err(Error::DegenerateParameter("a = 0 leaves q/a undefined".into()));
    }
    for q in qs {
        for n in 0..=n_max {
            let target = geometric(a, n)?;
            let mut direct = ExactScalar::zero();
            for j in 0..=n {
                direct = direct.add(&a.pow(j as i64)?);
            }
            if direct != target || cauchy_coefficient(a, q, n)? != target || reflected_sum(a, q, n)? != target {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The identity multiplied through by `(aq^{-N};q)_N`, which stays defined
/// when that product vanishes (`a = q^t`, `1 <= t <= N`).
pub fn sv5_cleared_check(a: &ExactScalar, q: &ExactScalar, n: u32) -> Result<bool> {
    if a.is_one() {
        return Err(Error::DegenerateParameter("a = 1 makes 1 - a vanish".into()));
    }
    let qn = q.pow(-(n as i64))?;
    let lhs = reflected_sum(a, q, n)?.mul(&qpoch_finite(&qn, q, n as usize));
    let rhs = geometric(a, n)?.mul(&qpoch_finite(&qn, q, n as usize));
    Ok(lhs == rhs)
}

/// Shift patterns with a predicted solution family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// `(l,l,0,n)`, `n` positive and even: `(a,-a,-q,x)`.
    EvenBinomial,
    /// `k+l-m+n = 0`: `(a,b,c,c/(ab))`.
    Balanced,
    /// `(k,l,l-k,-k)`, `l` positive and even: `(a,b,bq/a,-q/a)`.
    Kummer,
    /// `(0,l,l,0)`, `l >= 3`: `(ζ_l q, b, ζ_l b, 1)`.
    RootOfUnity,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [Pattern::EvenBinomial, Pattern::Balanced, Pattern::Kummer, Pattern::RootOfUnity];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::EvenBinomial => "even-binomial",
            Pattern::Balanced => "balanced",
            Pattern::Kummer => "kummer",
            Pattern::RootOfUnity => "root-of-unity",
        }
    }

    pub fn matches(self, s: ShiftVector) -> bool {
        let ShiftVector { k, l, m, n } = s;
        match self {
            Pattern::EvenBinomial => k == l && m == 0 && n > 0 && n % 2 == 0,
            Pattern::Balanced => s.balance() == 0,
            Pattern::Kummer => m == l - k && n == -k && l > 0 && l % 2 == 0,
            Pattern::RootOfUnity => k == 0 && n == 0 && l == m && l >= 3,
        }
    }

    pub fn family(self, s: ShiftVector) -> ParamFamily {
        match self {
            Pattern::EvenBinomial => binomial_family(),
            Pattern::Balanced => gauss_family(),
            Pattern::Kummer => kummer_family(),
            Pattern::RootOfUnity => root_of_unity_family(s.l as u32),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "even-binomial" | "(l,l,0,n)" | "lln" => Ok(Pattern::EvenBinomial),
            "balanced" | "k+l-m+n=0" => Ok(Pattern::Balanced),
            "kummer" | "(k,l,l-k,-k)" => Ok(Pattern::Kummer),
            "root-of-unity" | "(0,l,l,0)" => Ok(Pattern::RootOfUnity),
            _ => Err(Error::Parse(format!("unknown pattern `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureStep {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub pattern: Pattern,
    pub shift: ShiftVector,
    pub family: String,
    pub steps: Vec<ConjectureStep>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }

    fn push(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.steps.push(ConjectureStep { name: name.to_string(), passed, detail });
    }
}

const FAMILY_STEPS: u32 = 4;
const TELESCOPE_STEPS: u32 = 3;
const TOL: f64 = 1e-12;

/// Runs the pattern's checks on one instance with a freshly derived
/// relation. Each step is reported separately.
pub fn conjecture_check(pattern: Pattern, shift: ShiftVector, trials: usize, seed: u64) -> Result<ConjectureReport> {
    if !pattern.matches(shift) {
        return Err(Error::InvalidDomain(format!("{shift} does not have the shape of pattern {pattern}")));
    }
    let fam = pattern.family(shift);
    let mut report = ConjectureReport { pattern, shift, family: fam.to_string(), steps: Vec::new() };
    let rel = match qr_derive(shift, DEFAULT_DEGREE_BUDGET) {
        Ok(r) => {
            report.push("derive", Ok((true, format!("Q has {} + {} terms", r.q.num().len(), r.q.den().len()))));
            r
        }
        Err(e) => {
            report.push("derive", Err(e));
            return Ok(report);
        }
    };
    report.push(
        "check_family",
        check_family_with(&rel, &fam, FAMILY_STEPS, trials, seed).map(|ok| (ok, format!("N = 1..{FAMILY_STEPS}, {trials} trials"))),
    );
    match pattern {
        Pattern::EvenBinomial => even_binomial_steps(&rel, &fam, &mut report),
        Pattern::Balanced => balanced_steps(&rel, &fam, &mut report),
        Pattern::Kummer => kummer_steps(&rel, &fam, &mut report),
        Pattern::RootOfUnity => root_of_unity_steps(&rel, &fam, &mut report),
    }
    Ok(report)
}

fn run_summary(run: &crate::forge::PipelineRun) -> (bool, String) {
    let worst = run.steps.iter().map(|s| s.residual).fold(0.0, f64::max);
    (run.passed(), format!("N = 1..{}, max residual {worst:e}", run.n_max))
}

fn identity_step(id: &str, b: Bindings<ExactScalar>) -> Result<(bool, String)> {
    let r = verify_identity(identity(id)?, &b, TOL)?;
    Ok((r.passed, format!("lhs {} rhs {}", r.lhs, r.rhs)))
}

fn even_binomial_steps(rel: &ThreeTermRelation, fam: &ParamFamily, report: &mut ConjectureReport) {
    let (a, x, q) = (ex(1, 3), ex(1, 5), ex(1, 2));
    let point = BTreeMap::from([("a".into(), a.clone()), ("x".into(), x.clone()), ("q".into(), q.clone())]);
    report.push("telescoping", telescoped_check_with(rel, fam, TELESCOPE_STEPS, &point, TOL).map(|r| run_summary(&r)));
    let b = Bindings::default().with_scalar("a", a).with_scalar("x", x).with_scalar("q", q);
    report.push("qbinom2", identity_step("qbinom2", b));
}

fn balanced_steps(rel: &ThreeTermRelation, fam: &ParamFamily, report: &mut ConjectureReport) {
    let factor = MultiPoly::sym("c").sub(&MultiPoly::sym("a").mul(&MultiPoly::sym("b")).mul(&MultiPoly::sym("x")));
    let divides = rel.q.num().div_exact(&factor).is_some();
    report.push("factor c-abx", Ok((divides, "exact division of the numerator of Q".into())));
    let ShiftVector { k, l, m, n } = rel.shift;
    if k >= 0 && l >= 0 && n >= 0 && m > 0 {
        let (a, b, c, q) = (ex(2, 1), ex(3, 1), ex(1, 2), ex(1, 2));
        let point = BTreeMap::from([("a".into(), a.clone()), ("b".into(), b.clone()), ("c".into(), c.clone()), ("q".into(), q.clone())]);
        report.push("telescoping", telescoped_check_with(rel, fam, TELESCOPE_STEPS, &point, TOL).map(|r| run_summary(&r)));
        let bind = Bindings::default().with_scalar("a", a).with_scalar("b", b).with_scalar("c", c).with_scalar("q", q);
        report.push("qgauss", identity_step("qgauss", bind));
    }
}

fn kummer_steps(rel: &ThreeTermRelation, fam: &ParamFamily, report: &mut ConjectureReport) {
    let ShiftVector { k, l, .. } = rel.shift;
    let q = ex(1, 2);
    let qp = |e: i64| q.pow(e).expect("q is nonzero");
    let m = 1i64;
    let steps = TELESCOPE_STEPS as i64;
    let big_n = l * steps / 2;
    let point = BTreeMap::from([("a".into(), qp(m + 2)), ("b".into(), qp(-2 * big_n)), ("q".into(), q.clone())]);
    report.push("telescoping b = q^(-2N)", telescoped_check_with(rel, fam, TELESCOPE_STEPS, &point, 0.0).map(|r| run_summary(&r)));
    let b = Bindings::default().with_int("M", m).with_int("N", big_n).with_scalar("q", q.clone());
    report.push("sv1", identity_step("sv1", b));
    if k > 0 && l <= 2 * k {
        let big_n = k * steps;
        let point = BTreeMap::from([("a".into(), qp(-big_n)), ("b".into(), qp(-m - 2 * big_n - 2)), ("q".into(), q.clone())]);
        report.push("telescoping a = q^(-N)", telescoped_check_with(rel, fam, TELESCOPE_STEPS, &point, 0.0).map(|r| run_summary(&r)));
        let b = Bindings::default().with_int("M", m).with_int("N", big_n).with_scalar("q", q);
        report.push("sv3", identity_step("sv3", b));
    }
}

fn root_of_unity_steps(rel: &ThreeTermRelation, fam: &ParamFamily, report: &mut ConjectureReport) {
    let l = rel.shift.l as u32;
    let q = ex(1, 2);
    let zeta = ExactScalar::zeta(l);
    let outcome = (|| -> Result<(bool, String)> {
        let sv5 = identity("sv5")?;
        let mut all = true;
        for big_n in 0..=4u32 {
            let b = Bindings::default().with_int("N", big_n as i64).with_scalar("a", zeta.clone()).with_scalar("q", q.clone());
            let direct = verify_identity(sv5, &b, 0.0)?;
            let pt = FamilyPoint { free: vec![q.pow(-(big_n as i64))?], q: q.clone() };
            let (tel, _) = telescoped_step(rel, fam, &pt, big_n / l, 0.0)?;
            let expected = crate::qseries::closed_form_eval(&sv5.rhs, &b, 0.0)?;
            let tel_ok = matches!(&tel, PhiValue::Exact(v) if *v == expected);
            all &= direct.passed && tel_ok;
        }
        Ok((all, format!("a = ζ_{l}, N = 0..4, telescoped over floor(N/{l}) steps")))
    })();
    report.push("sv5 at root of unity", outcome);
}

/// `RationalFunction` of `Q^(N)` restricted to a family, for inspection.
pub fn restricted_q(rel: &ThreeTermRelation, fam: &ParamFamily, step: u32) -> Result<RationalFunction> {
    crate::relations::shift_params(fam, rel.shift, step).substitute_into(&rel.q)
}
