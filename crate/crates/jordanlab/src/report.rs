//! Machine-readable check records and their markdown rendering.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check_name: String,
    pub algebra: String,
    pub seed: u64,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expected_failure: bool,
}

impl Record {
    /// Passes iff `residual <= threshold` (NaN never passes).
    pub fn new(check: &str, algebra: &str, seed: u64, residual: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Record {
            check_name: check.to_string(),
            algebra: algebra.to_string(),
            seed,
            residual,
            threshold,
            pass: residual <= threshold,
            detail: detail.into(),
            expected_failure: false,
        }
    }

    /// Negative control: passes iff the injected defect was detected.
    pub fn control(check: &str, algebra: &str, seed: u64, residual: f64, threshold: f64, detected: bool, detail: impl Into<String>) -> Self {
        Record {
            check_name: check.to_string(),
            algebra: algebra.to_string(),
            seed,
            residual,
            threshold,
            pass: detected,
            detail: detail.into(),
            expected_failure: true,
        }
    }

    /// Boolean outcome recorded with residual 0 (pass) or 1 (fail).
    pub fn boolean(check: &str, algebra: &str, seed: u64, ok: bool, detail: impl Into<String>) -> Self {
        Record::new(check, algebra, seed, if ok { 0.0 } else { 1.0 }, 0.5, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: serde_json::Value,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(suite: &str, config: serde_json::Value, mut records: Vec<Record>) -> Self {
        sort_records(&mut records);
        Report { suite: suite.to_string(), config, records }
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_markdown(&self) -> String {
        let passed = self.records.iter().filter(|r| r.pass).count();
        let mut out = format!("# Suite `{}`\n\n{} of {} records pass.\n\n", self.suite, passed, self.records.len());
        out.push_str("| check | algebra | seed | residual | threshold | pass | detail |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for r in &self.records {
            let status = match (r.pass, r.expected_failure) {
                (true, false) => "pass",
                (true, true) => "pass (control)",
                (false, false) => "FAIL",
                (false, true) => "FAIL (control)",
            };
            out.push_str(&format!(
                "| {} | {} | {} | {:.3e} | {:.1e} | {} | {} |\n",
                r.check_name,
                r.algebra,
                r.seed,
                r.residual,
                r.threshold,
                status,
                r.detail.replace('|', "/")
            ));
        }
        out
    }
}

pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| {
        (a.check_name.as_str(), a.algebra.as_str(), a.seed).cmp(&(b.check_name.as_str(), b.algebra.as_str(), b.seed))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_threshold() {
        assert!(Record::new("c", "a", 0, 1e-12, 1e-9, "").pass);
        assert!(!Record::new("c", "a", 0, 1e-3, 1e-9, "").pass);
        assert!(!Record::new("c", "a", 0, f64::NAN, 1e-9, "").pass);
    }

    #[test]
    fn expected_failure_serialized_only_when_set() {
        let r = Record::new("c", "a", 0, 0.0, 1.0, "");
        assert!(!serde_json::to_string(&r).unwrap().contains("expected_failure"));
        let c = Record::control("c", "a", 0, 1.0, 1e-9, true, "");
        assert!(serde_json::to_string(&c).unwrap().contains("\"expected_failure\":true"));
    }

    #[test]
    fn records_sorted_stably() {
        let rep = Report::new(
            "s",
            serde_json::Value::Null,
            vec![Record::boolean("b", "x", 1, true, ""), Record::boolean("a", "y", 2, true, ""), Record::boolean("a", "x", 3, true, "")],
        );
        let keys: Vec<_> = rep.records.iter().map(|r| (r.check_name.clone(), r.algebra.clone())).collect();
        assert_eq!(keys, vec![("a".into(), "x".into()), ("a".into(), "y".into()), ("b".into(), "x".into())]);
        assert!(rep.to_markdown().contains("3 of 3 records pass"));
    }
}
