//! Browser bindings for three qforge operations. Each returns a JSON string;
//! the `*_json` functions hold the logic so it can be tested natively.

use std::collections::BTreeMap;

use qforge::exact_arith::{ApproxScalar, ExactScalar};
use qforge::forge::{identity, verify_identity};
use qforge::qseries::{closed_form_eval, phi21_terminating, Bindings, Phi21Params};
use qforge::relations::ShiftVector;
use qforge::symmetry::{canonical_representative, orbit_enumerate};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest number of partial sums the convergence curve will compute.
pub const MAX_TERMS: usize = 200;

fn scalar(text: &str) -> Result<ExactScalar, String> {
    let t = text.trim();
    if let Some(order) = t.strip_prefix("zeta") {
        return match order.parse::<u32>() {
            Ok(n) if n > 0 => Ok(ExactScalar::zeta(n)),
            _ => Err(format!("bad root of unity `{t}`")),
        };
    }
    t.parse().map_err(|e: qforge::Error| e.to_string())
}

/// Checks a registered identity. `bindings` is a JSON object whose values are
/// integers for integer symbols and strings such as `"1/2"` or `"zeta3"` for
/// scalar symbols.
pub fn verify_json(id: &str, bindings: &str, tol: f64) -> Result<String, String> {
    let rec = identity(id).map_err(|e| e.to_string())?;
    let given: BTreeMap<String, Value> = serde_json::from_str(bindings).map_err(|e| format!("bindings: {e}"))?;
    let mut b = Bindings::<ExactScalar>::default();
    for (name, v) in given {
        if rec.int_symbols.contains(&name) {
            let n = match &v {
                Value::Number(n) => n.as_i64(),
                Value::String(s) => s.trim().parse().ok(),
                _ => None,
            };
            b.ints.insert(name.clone(), n.ok_or_else(|| format!("`{name}` must be an integer"))?);
        } else {
            let text = match &v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(format!("`{name}` must be a number or a string")),
            };
            b.scalars.insert(name, scalar(&text)?);
        }
    }
    let check = verify_identity(rec, &b, tol).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&check).expect("check serializes"))
}

/// Canonical representative of a shift, the word reaching it, and the orbit.
pub fn normalize_json(shift: &str) -> Result<String, String> {
    let s: ShiftVector = shift.parse().map_err(|e: qforge::Error| e.to_string())?;
    let (rep, word) = canonical_representative(s).map_err(|e| e.to_string())?;
    let orbit: Vec<String> = orbit_enumerate(s).iter().map(ToString::to_string).collect();
    Ok(json!({ "shift": s.to_string(), "representative": rep.to_string(), "word": word.to_string(), "orbit": orbit }).to_string())
}

/// Partial sums of `Σ (a;q)_n/(q;q)_n x^n` against `(ax;q)_∞/(x;q)_∞`.
pub fn qbinomial_curve_json(a: &str, x: &str, q: &str, terms: usize) -> Result<String, String> {
    if terms == 0 || terms > MAX_TERMS {
        return Err(format!("terms must lie in 1..={MAX_TERMS}"));
    }
    let rec = identity("qbinom").map_err(|e| e.to_string())?;
    let (a, x, q) = (scalar(a)?, scalar(x)?, scalar(q)?);
    let b = Bindings::default().with_scalar("a", a.clone()).with_scalar("x", x.clone()).with_scalar("q", q.clone());
    rec.check_constraints(&b).map_err(|e| e.to_string())?;
    let ab: Bindings<ApproxScalar> = Bindings { ints: BTreeMap::new(), scalars: b.scalars.iter().map(|(k, v)| (k.clone(), ApproxScalar::from(v))).collect() };
    let limit = closed_form_eval(&rec.rhs, &ab, 1e-30).map_err(|e| e.to_string())?;
    let zero = ApproxScalar::from_f64(0.0);
    let p = Phi21Params::new(ApproxScalar::from(&a), zero.clone(), zero, ApproxScalar::from(&q), ApproxScalar::from(&x));
    let mut points = Vec::with_capacity(terms);
    for n in 0..terms {
        let partial = phi21_terminating(&p, n).map_err(|e| e.to_string())?.value;
        let gap = partial.sub(&limit).abs_f64();
        points.push(json!({ "n": n, "partial": partial.re_f64(), "gap": gap }));
    }
    Ok(json!({ "limit": limit.re_f64(), "points": points }).to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(id: &str, bindings: &str, tol: f64) -> Result<String, JsError> {
    js(verify_json(id, bindings, tol))
}

#[wasm_bindgen]
pub fn normalize(shift: &str) -> Result<String, JsError> {
    js(normalize_json(shift))
}

#[wasm_bindgen]
pub fn qbinomial_curve(a: &str, x: &str, q: &str, terms: usize) -> Result<String, JsError> {
    js(qbinomial_curve_json(a, x, q, terms))
}
