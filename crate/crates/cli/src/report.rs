//! Report records and their text and JSON renderings.

use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        }
    }
}

/// One checked identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    /// What the check is about.
    pub anchor: String,
    pub n: usize,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub status: Status,
}

/// A stated value that disagrees with the oracle while a corrected value
/// agrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub check: String,
    pub n: usize,
    pub stated: String,
    pub observed: String,
    pub stated_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub warned: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub deviations: Vec<Deviation>,
    /// Free-form named values such as classifier intermediates.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<(String, serde_json::Value)>,
    pub summary: Summary,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.summary.total += 1;
        match check.status {
            Status::Pass => self.summary.passed += 1,
            Status::Warn => self.summary.warned += 1,
            Status::Fail => self.summary.failed += 1,
        }
        self.checks.push(check);
    }

    pub fn detail(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.push((name.to_string(), v));
    }

    /// No check failed; warnings are allowed.
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<width$} n={} samples={:<4} residual={:.3e} tol={:.1e}  [{}: {}]",
                c.status.label(),
                c.name,
                c.n,
                c.samples,
                c.max_residual,
                c.tolerance,
                c.suite,
                c.anchor,
            );
        }
        for d in &self.deviations {
            let _ = writeln!(
                out,
                "WARN deviation {} n={}: stated {} (residual {:.3e}), observed {}",
                d.check, d.n, d.stated, d.stated_residual, d.observed
            );
        }
        for (name, v) in &self.details {
            let _ = writeln!(out, "detail {name}: {v}");
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} checks, {} passed, {} warned, {} failed",
            s.total, s.passed, s.warned, s.failed
        );
        out
    }
}
