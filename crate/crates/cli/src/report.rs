use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

/// One case of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub case: BTreeMap<String, String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<usize>,
    /// Command-specific outputs (relation coefficients, words, products).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseRecord {
    pub fn new(index: usize, case: BTreeMap<String, String>, status: Status) -> Self {
        CaseRecord { index, case, status, lhs: None, rhs: None, abs_err: None, terms_used: None, values: BTreeMap::new(), note: None }
    }

    pub fn error(index: usize, case: BTreeMap<String, String>, message: impl Into<String>) -> Self {
        CaseRecord { note: Some(message.into()), ..CaseRecord::new(index, case, Status::Error) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
}

impl Summary {
    pub fn of(records: &[CaseRecord]) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        Summary { total: records.len(), passed: count(Status::Pass), failed: count(Status::Fail), errored: count(Status::Error) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub records: Vec<CaseRecord>,
    pub summary: Summary,
}

impl ReportDocument {
    /// Records are sorted by index and the summary recomputed.
    pub fn new(command: String, seed: u64, mut records: Vec<CaseRecord>) -> Self {
        records.sort_by_key(|r| r.index);
        let summary = Summary::of(&records);
        ReportDocument { command, tool: "qforge".into(), version: env!("CARGO_PKG_VERSION").into(), seed, records, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    /// 0 when every case passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {}: {}", self.tool, self.version, self.command);
        for r in &self.records {
            let case: Vec<String> = r.case.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(out, "{:>4} {:<5} {}", r.index, r.status.label(), case.join(" "));
            if let (Some(l), Some(rh)) = (&r.lhs, &r.rhs) {
                let _ = write!(out, "  lhs={l} rhs={rh}");
            }
            if let Some(e) = r.abs_err {
                let _ = write!(out, "  err={e:.3e}");
            }
            if let Some(t) = r.terms_used {
                let _ = write!(out, "  terms={t}");
            }
            for (k, v) in &r.values {
                let _ = write!(out, "\n       {k}: {v}");
            }
            if let Some(n) = &r.note {
                let _ = write!(out, "\n       note: {n}");
            }
            out.push('\n');
        }
        let s = self.summary;
        let _ = writeln!(out, "total {}  passed {}  failed {}  errored {}  (seed {:#x})", s.total, s.passed, s.failed, s.errored, self.seed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDocument {
        let mut a = CaseRecord::new(1, BTreeMap::from([("N".into(), "2".into())]), Status::Fail);
        a.abs_err = Some(0.1 + 0.2);
        a.values.insert("Q".into(), "a*b".into());
        let b = CaseRecord::error(0, BTreeMap::new(), "boom");
        ReportDocument::new("verify --identity sv1".into(), 7, vec![a, b])
    }

    #[test]
    fn records_sorted_and_counted() {
        let doc = sample();
        assert_eq!(doc.records[0].index, 0);
        assert_eq!(doc.summary, Summary { total: 2, passed: 0, failed: 1, errored: 1 });
        assert_eq!(doc.exit_code(), 1);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let doc = sample();
        let back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), doc.to_json());
    }

    #[test]
    fn empty_report_passes() {
        assert_eq!(ReportDocument::new("x".into(), 0, vec![]).exit_code(), 0);
    }
}
