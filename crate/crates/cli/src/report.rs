//! Report assembly and output. Results keep the declaration order of the
//! spec file; JSON output is byte-deterministic apart from the top-level
//! `timing` object.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "text" => Some(Format::Text),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub spec_path: String,
    pub spec_sha256: String,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    /// Wall-clock data, the only nondeterministic part of the report.
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub check: String,
    pub target: String,
    pub seed: u64,
    pub outcome: Value,
    pub expectation: ExpectationOutcome,
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExpectationOutcome {
    /// No expectation was declared for this check.
    None,
    Met,
    Failed { failures: Vec<String> },
}

impl ExpectationOutcome {
    pub fn failed(&self) -> bool {
        matches!(self, ExpectationOutcome::Failed { .. })
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub checks_run: usize,
    pub expectations_declared: usize,
    pub expectations_failed: usize,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
}

impl ReportDocument {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "minty report (tool {})", self.tool_version);
        let _ = writeln!(out, "spec: {}", self.spec_path);
        let _ = writeln!(out, "sha256: {}", self.spec_sha256);
        let _ = writeln!(out);
        for r in &self.results {
            let headline = outcome_headline(&r.outcome);
            let exp = match &r.expectation {
                ExpectationOutcome::None => String::new(),
                ExpectationOutcome::Met => " [expectation met]".to_string(),
                ExpectationOutcome::Failed { failures } => {
                    format!(" [EXPECTATION FAILED: {}]", failures.join("; "))
                }
            };
            let _ = writeln!(
                out,
                "{:>3}. {} on {} (seed {}) -> {}{}",
                r.index, r.check, r.target, r.seed, headline, exp
            );
            for line in outcome_details(&r.outcome) {
                let _ = writeln!(out, "     {line}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "summary: {} checks, {} expectations declared, {} failed",
            self.summary.checks_run,
            self.summary.expectations_declared,
            self.summary.expectations_failed
        );
        out
    }
}

/// One-line description of an outcome value for the text rendering.
fn outcome_headline(outcome: &Value) -> String {
    if let Some(v) = outcome.get("verdict").and_then(Value::as_str) {
        return v.to_string();
    }
    if let Some(v) = outcome
        .get("report")
        .and_then(|r| r.get("verdict"))
        .and_then(Value::as_str)
    {
        return v.to_string();
    }
    if let Some(b) = outcome.get("all_consistent").and_then(Value::as_bool) {
        return if b {
            "all rows consistent".to_string()
        } else {
            "INCONSISTENT rows".to_string()
        };
    }
    if let Some(b) = outcome.get("agree").and_then(Value::as_bool) {
        let beta = outcome
            .get("beta")
            .and_then(Value::as_f64)
            .map(|b| format!(" (beta {b})"))
            .unwrap_or_default();
        return if b {
            format!("conditions agree{beta}")
        } else {
            format!("conditions DISAGREE{beta}")
        };
    }
    if let Some(o) = outcome.get("outcome").and_then(Value::as_str) {
        return o.to_string();
    }
    if let Some(b) = outcome.get("converged").and_then(Value::as_bool) {
        let n = outcome
            .get("iterations_used")
            .and_then(Value::as_u64)
            .unwrap_or(0);
        return if b {
            format!("converged in {n} iterations")
        } else {
            format!("did not converge in {n} iterations")
        };
    }
    "done".to_string()
}

/// Constant table lines for the text rendering.
fn outcome_details(outcome: &Value) -> Vec<String> {
    let constants = outcome
        .get("constants")
        .or_else(|| outcome.get("report").and_then(|r| r.get("constants")));
    let mut lines = Vec::new();
    if let Some(Value::Object(map)) = constants {
        for (k, v) in map {
            if let Some(x) = v.as_f64() {
                lines.push(format!("{k} = {x}"));
            }
        }
    }
    if let Some(Value::Array(notes)) = outcome
        .get("notes")
        .or_else(|| outcome.get("report").and_then(|r| r.get("notes")))
    {
        for n in notes {
            if let Some(s) = n.as_str() {
                lines.push(format!("note: {s}"));
            }
        }
    }
    lines
}

/// Writes `content` to `path` atomically: a temp file in the same directory
/// is renamed over the target, so a partially written report never exists
/// under the final name.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp_name = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp");
            n
        }
        None => {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "output path has no file name",
            ))
        }
    };
    let tmp_path = match dir {
        Some(d) => d.join(&tmp_name),
        None => tmp_name.into(),
    };
    {
        let mut f = fs::File::create(&tmp_path)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp_path, path)
}
