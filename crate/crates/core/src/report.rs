//! Verification reports: one record per check, serialized deterministically.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    /// Wall time, only filled in when timings are requested.
    pub elapsed_ms: Option<u64>,
    pub details: Value,
}

impl CheckRecord {
    /// Record whose status is decided by `passed`. A non-finite residual always fails.
    pub fn new(
        id: impl Into<String>,
        passed: bool,
        max_residual: f64,
        tolerance: f64,
        samples: usize,
        seed: u64,
        details: Value,
    ) -> Self {
        let (status, residual, details) = if max_residual.is_finite() {
            (if passed { Status::Pass } else { Status::Fail }, max_residual, details)
        } else {
            let mut d = details;
            if let Value::Object(m) = &mut d {
                m.insert("non_finite_residual".into(), Value::String(format!("{max_residual}")));
            }
            (Status::Fail, f64::MAX, d)
        };
        Self { id: id.into(), status, max_residual: residual, tolerance, samples, seed, elapsed_ms: None, details }
    }

    /// Record passing iff `max_residual <= tolerance`.
    pub fn threshold(
        id: impl Into<String>,
        max_residual: f64,
        tolerance: f64,
        samples: usize,
        seed: u64,
        details: Value,
    ) -> Self {
        Self::new(id, max_residual <= tolerance, max_residual, tolerance, samples, seed, details)
    }

    pub fn skip(id: impl Into<String>, tolerance: f64, seed: u64, reason: &str) -> Self {
        Self {
            id: id.into(),
            status: Status::Skip,
            max_residual: 0.0,
            tolerance,
            samples: 0,
            seed,
            elapsed_ms: None,
            details: serde_json::json!({ "reason": reason }),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn with_elapsed(mut self, ms: Option<u64>) -> Self {
        self.elapsed_ms = ms;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    /// Sorts records by id; overall status fails iff some record failed.
    pub fn new(suite: impl Into<String>, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let status = if checks.iter().any(|c| c.status == Status::Fail) { Status::Fail } else { Status::Pass };
        Self { suite: suite.into(), status, checks }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn find(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}: {}", self.suite, self.status.as_str());
        for c in &self.checks {
            let _ = write!(
                out,
                "  [{}] {}  residual={:e} tol={:e} samples={} seed={}",
                c.status.as_str(),
                c.id,
                c.max_residual,
                c.tolerance,
                c.samples,
                c.seed
            );
            if let Some(ms) = c.elapsed_ms {
                let _ = write!(out, " elapsed_ms={ms}");
            }
            out.push('\n');
            if !c.details.is_null() && c.details != serde_json::json!({}) {
                let _ = writeln!(out, "      {}", c.details);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overall_status_and_order() {
        let r = VerificationReport::new(
            "t",
            vec![
                CheckRecord::threshold("b", 1.0, 0.5, 1, 0, json!({})),
                CheckRecord::threshold("a", 0.1, 0.5, 1, 0, json!({})),
                CheckRecord::skip("c", 0.0, 0, "mode"),
            ],
        );
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.checks[0].id, "a");
        assert_eq!(r.find("c").unwrap().status, Status::Skip);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"][1]["status"], "fail");
        assert!(v["checks"][0]["elapsed_ms"].is_null());
        assert!(r.to_text().contains("[fail] b"));
    }

    #[test]
    fn non_finite_residuals_fail() {
        let c = CheckRecord::threshold("x", f64::NAN, 1.0, 1, 0, json!({}));
        assert_eq!(c.status, Status::Fail);
        assert!(c.max_residual.is_finite());
        assert!(c.details["non_finite_residual"].is_string());
    }
}
