//! Structured run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use cohomkit::{Error, Result};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// How a single check is judged.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Exact comparison over rationals or integers.
    Exact(bool),
    /// Floating residual against a tolerance; NaN fails.
    Residual { value: f64, tol: f64 },
}

impl Outcome {
    pub fn within(value: f64, tol: f64) -> Self {
        Outcome::Residual { value, tol }
    }

    pub fn passed(&self) -> bool {
        match *self {
            Outcome::Exact(ok) => ok,
            Outcome::Residual { value, tol } => value.is_finite() && value <= tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn from_result(name: &str, result: &Result<Outcome>, runtime_ms: Option<u64>) -> Self {
        let mut rec = CheckRecord {
            name: name.to_string(),
            status: Status::Fail,
            exact: false,
            residual: None,
            tolerance: None,
            runtime_ms,
            error: None,
        };
        match result {
            Ok(out) => {
                if out.passed() {
                    rec.status = Status::Pass;
                }
                match *out {
                    Outcome::Exact(_) => rec.exact = true,
                    Outcome::Residual { value, tol } => {
                        rec.residual = Some(value);
                        rec.tolerance = Some(tol);
                    }
                }
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Value>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            command,
            seed,
            checks: Vec::new(),
            results: BTreeMap::new(),
            summary: Summary::default(),
            error: None,
        }
    }

    pub fn push(&mut self, rec: CheckRecord) {
        self.checks.push(rec);
        self.finish();
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.results.insert(key.to_string(), v);
    }

    pub fn fail_with(&mut self, e: &Error) {
        self.error = Some(ErrorRecord {
            kind: error_kind(e).to_string(),
            message: e.to_string(),
        });
    }

    /// Sorts checks by name and recounts.
    pub fn finish(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        self.summary = Summary {
            total: self.checks.len(),
            passed,
            failed: self.checks.len() - passed,
        };
    }

    pub fn all_passed(&self) -> bool {
        self.error.is_none() && self.summary.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => kind_exit_code(&e.kind),
            None if self.summary.failed > 0 => 1,
            None => 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cohomkit {} (schema {}, seed {})", self.command.join(" "), self.schema, self.seed);
        for (k, v) in &self.results {
            let _ = writeln!(out, "{k}: {}", text_value(v));
        }
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let mut line = format!("{status} {}", c.name);
            if c.exact {
                line.push_str(" [exact]");
            }
            if let (Some(r), Some(t)) = (c.residual, c.tolerance) {
                let _ = write!(line, " residual={r:.3e} tol={t:.0e}");
            }
            if let Some(ms) = c.runtime_ms {
                let _ = write!(line, " {ms}ms");
            }
            if let Some(e) = &c.error {
                let _ = write!(line, " error: {e}");
            }
            let _ = writeln!(out, "{line}");
        }
        if !self.checks.is_empty() {
            let s = self.summary;
            let _ = writeln!(out, "{} checks, {} passed, {} failed", s.total, s.passed, s.failed);
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error ({}): {}", e.kind, e.message);
        }
        out
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(text_value).collect::<Vec<_>>().join(" "),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Coarse error class used for exit codes.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) | Error::Arity { .. } => "parse",
        Error::Jacobi(..) => "jacobi",
        Error::Budget(_) => "budget",
        _ => "failure",
    }
}

pub fn kind_exit_code(kind: &str) -> i32 {
    match kind {
        "parse" => 2,
        "jacobi" => 3,
        "budget" => 4,
        _ => 1,
    }
}

/// Runs `f`, optionally recording wall time.
pub fn timed<T>(timings: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    if timings {
        let start = Instant::now();
        let v = f();
        (v, Some(start.elapsed().as_millis() as u64))
    } else {
        (f(), None)
    }
}
