use qforge_wasm::{normalize_json, qbinomial_curve_json, verify_json, MAX_TERMS};
use serde_json::Value;

fn parse(text: String) -> Value {
    serde_json::from_str(&text).unwrap()
}

#[test]
fn verify_exact_and_numeric() {
    let v = parse(verify_json("sv1", r#"{"M": 0, "N": 1, "q": "1/2"}"#, 0.0).unwrap());
    assert_eq!(v["passed"], true);
    assert_eq!(v["lhs"], "5/7");
    let v = parse(verify_json("qgauss", r#"{"a": "2", "b": "5", "c": "1/5", "q": "1/3"}"#, 1e-12).unwrap());
    assert_eq!(v["passed"], true, "{v}");
    let v = parse(verify_json("sv4", r#"{"N": 2, "w": "zeta3", "q": "1/2"}"#, 0.0).unwrap());
    assert_eq!(v["passed"], true, "{v}");
}

#[test]
fn verify_reports_bad_input() {
    assert!(verify_json("nope", "{}", 0.0).is_err());
    assert!(verify_json("sv1", "[", 0.0).is_err());
    assert!(verify_json("sv1", r#"{"M": "x", "N": 1, "q": "1/2"}"#, 0.0).is_err());
    assert!(verify_json("sv1", r#"{"M": 0, "N": 1, "q": "zeta0"}"#, 0.0).is_err());
}

#[test]
fn normalize_gives_orbit() {
    let v = parse(normalize_json("0,0,0,2").unwrap());
    assert_eq!(v["representative"], "(0,2,2,0)");
    assert_eq!(v["orbit"].as_array().unwrap().len(), 6);
    assert!(normalize_json("1,2").is_err());
}

#[test]
fn curve_converges_to_product() {
    let v = parse(qbinomial_curve_json("1/3", "1/2", "1/2", 60).unwrap());
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 60);
    assert_eq!(points[0]["partial"], 1.0);
    let gaps: Vec<f64> = points.iter().map(|p| p["gap"].as_f64().unwrap()).collect();
    assert!(gaps[59] < 1e-15 * gaps[0], "{gaps:?}");
    assert!(qbinomial_curve_json("1/3", "3/2", "1/2", 10).is_err());
    assert!(qbinomial_curve_json("1/3", "1/2", "1/2", MAX_TERMS + 1).is_err());
}

#[test]
fn page_examples_hold() {
    let page = include_str!("../www/index.html");
    let mut seen = 0;
    for line in page.lines() {
        let Some((id, rest)) = line.trim().split_once(": '") else { continue };
        let Some(bindings) = rest.strip_suffix("',") else { continue };
        let tol = if id.starts_with("sv") { 0.0 } else { 1e-12 };
        let v = parse(verify_json(id, bindings, tol).unwrap_or_else(|e| panic!("{id}: {e}")));
        assert_eq!(v["passed"], true, "{id}: {v}");
        seen += 1;
    }
    assert_eq!(seen, 9);
}
