use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// Direction of the comparison between a measured value and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured value; a residual for `at-most` checks.
    pub residual: f64,
    pub tolerance: f64,
    pub expect: Expect,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    /// The statement the check certifies.
    pub anchor: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64, anchor: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            expect: Expect::AtMost,
            passed: residual <= tolerance,
            witness: None,
            anchor: anchor.into(),
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, anchor: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: bound,
            expect: Expect::AtLeast,
            passed: value >= bound,
            witness: None,
            anchor: anchor.into(),
        }
    }

    pub fn with_witness(mut self, witness: impl Serialize) -> Self {
        self.witness = serde_json::to_value(witness).ok();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub name: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(name: impl Into<String>, ts: &[f64], errors: &[f64]) -> Self {
        Self {
            name: name.into(),
            rows: ts.iter().zip(errors).map(|(&t, &error)| ConvergenceRow { t, error }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub seed: u64,
    pub dimension: usize,
    pub checks: Vec<Check>,
    pub totals: Totals,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergenceTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteReport {
    /// Status is `fail` iff some check fails, `error` if the suite aborted.
    pub fn new(
        suite: &str,
        seed: u64,
        dimension: usize,
        checks: Vec<Check>,
        convergence: Vec<ConvergenceTable>,
        error: Option<String>,
    ) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let totals = Totals { checks: checks.len(), passed, failed: checks.len() - passed };
        let status = if error.is_some() {
            Status::Error
        } else if totals.failed > 0 {
            Status::Fail
        } else {
            Status::Pass
        };
        Self { suite: suite.to_string(), status, seed, dimension, checks, totals, convergence, error }
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter(|c| c.expect == Expect::AtMost).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}: {} ({}/{} checks passed)",
            self.suite, self.status, self.totals.passed, self.totals.checks
        );
        for c in &self.checks {
            let op = match c.expect {
                Expect::AtMost => "<=",
                Expect::AtLeast => ">=",
            };
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "  [{mark}] {}: {:.3e} {op} {:.1e}  ({})", c.name, c.residual, c.tolerance, c.anchor);
            if let (false, Some(w)) = (c.passed, &c.witness) {
                let _ = writeln!(out, "         witness: {w}");
            }
        }
        for table in &self.convergence {
            let _ = writeln!(out, "  convergence {}:", table.name);
            for row in &table.rows {
                let _ = writeln!(out, "    t = {:>10.3e}  error = {:.3e}", row.t, row.error);
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error: {e}");
        }
        out
    }
}
