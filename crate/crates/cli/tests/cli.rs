use std::process::{Command, Output};

use qforge_cli::report::{ReportDocument, Status};

fn qforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qforge")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (ReportDocument, i32) {
    let out = qforge(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = ReportDocument::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (doc, out.status.code().unwrap())
}

#[test]
fn verify_sv1_grid() {
    let (doc, code) = report(&["verify", "--identity", "sv1", "--grid", "M=0..6,N=0..6", "--q", "1/2", "--mode", "exact"]);
    assert_eq!(code, 0);
    assert_eq!(doc.summary.total, 49);
    assert_eq!(doc.summary.passed, 49);
    assert_eq!(doc.records[0].case["M"], "0");
    assert!(doc.records.windows(2).all(|w| w[0].index < w[1].index));
}

#[test]
fn normalize_example() {
    let (doc, code) = report(&["normalize", "--shift", "0,0,0,2"]);
    assert_eq!(code, 0);
    assert_eq!(doc.records[0].values["representative"], "0,2,2,0");
    assert!(!doc.records[0].values["word"].is_empty());
}

#[test]
fn derive_matches_table() {
    let (doc, code) = report(&["derive", "--shift", "0,1,1,0", "--check-against-table"]);
    assert_eq!(code, 0);
    assert_eq!(doc.records[0].status, Status::Pass);
    assert!(doc.records[0].values.contains_key("R"));
}

#[test]
fn negative_shift_components_parse() {
    let (doc, code) = report(&["derive", "--shift", "1,2,1,-1", "--check-against-table"]);
    assert_eq!(code, 0, "{doc:?}");
}

#[test]
fn pipeline_and_conjecture() {
    let (doc, code) = report(&["pipeline", "--shift", "0,1,1,0", "--point", "a=3,b=5,c=1/7,q=1/2"]);
    assert_eq!((code, doc.summary.total), (0, 5));
    let (doc, code) = report(&["conjecture", "--pattern", "balanced", "--shift", "1,1,2,0"]);
    assert_eq!(code, 0, "{doc:?}");
}

#[test]
fn sampled_numeric_verification() {
    let (doc, code) = report(&["verify", "--identity", "qkummer", "--samples", "5"]);
    assert_eq!((code, doc.summary.passed), (0, 5));
    assert!(doc.records.iter().all(|r| r.case.contains_key("q")));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["verify", "--identity", "qgauss", "--samples", "6", "--seed", "11"];
    let a = qforge(&args).stdout;
    let b = qforge(&args).stdout;
    assert_eq!(a, b);
    let c = qforge(&["verify", "--identity", "qgauss", "--samples", "6", "--seed", "12"]).stdout;
    assert_ne!(a, c);
}

#[test]
fn failing_case_exits_one() {
    // Exact mode needs a terminating series; q = 1 is outside every record's domain.
    let (doc, code) = report(&["verify", "--identity", "sv5", "--grid", "N=0..2", "--q", "1/2", "--bind", "a=1"]);
    assert_eq!(code, 1);
    assert_eq!(doc.summary.errored, 3);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--identity", "nope"],
        vec!["verify", "--identity", "sv1", "--grid", "K=0..2"],
        vec!["verify", "--identity", "sv1", "--grid", "M=3..1"],
        vec!["verify", "--identity", "qgauss", "--tol", "0"],
        vec!["derive", "--shift", "2,2,0,2", "--check-against-table"],
        vec!["conjecture", "--pattern", "kummer", "--shift", "0,1,1,0"],
        vec!["frobnicate"],
    ] {
        let out = qforge(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn text_format_and_output_file() {
    let dir = std::env::temp_dir().join(format!("qforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.txt");
    let out = qforge(&["normalize", "--shift", "0,0,0,2", "--format", "text", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("representative: 0,2,2,0"), "{text}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn precision_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_qforge")).args(["normalize", "--shift", "0,0,0,2"]).env("QFORGE_PRECISION", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_qforge"))
        .args(["verify", "--identity", "qbinom", "--samples", "3"])
        .env("QFORGE_PRECISION", "256")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn registry_file_flag() {
    let dir = std::env::temp_dir().join(format!("qforge-reg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{").unwrap();
    assert_eq!(qforge(&["verify", "--identity", "sv1", "--registry", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}
