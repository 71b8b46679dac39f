//! Line-oriented `key=value` reports with a JSON sidecar.
//!
//! The first line of a rendered report carries the generation time and is
//! the only line that may differ between two runs with the same
//! configuration; everything after it is the report body.

use std::fmt::Display;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of a pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pipeline: String,
    lines: Vec<(String, String)>,
    checks: Vec<(String, bool)>,
    sidecar: Map<String, Value>,
    error: Option<String>,
}

impl Report {
    /// A report for `pipeline`, tagged with the statement it checks.
    pub fn new(pipeline: &str, anchor: &str) -> Self {
        let mut report = Report {
            pipeline: pipeline.to_string(),
            lines: Vec::new(),
            checks: Vec::new(),
            sidecar: Map::new(),
            error: None,
        };
        report.record("tool", format!("treerep {TOOL_VERSION}"));
        report.record("pipeline", pipeline);
        report.record("anchor", anchor);
        report
    }

    pub fn pipeline(&self) -> &str {
        &self.pipeline
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        let value = value.to_string().replace('\n', "\\n");
        self.sidecar
            .insert(key.to_string(), Value::String(value.clone()));
        self.lines.push((key.to_string(), value));
    }

    /// Adds a structured value to the JSON sidecar only.
    pub fn attach(&mut self, key: &str, value: Value) {
        self.sidecar.insert(key.to_string(), value);
    }

    /// Records a named assertion; the report passes only if all hold.
    pub fn check(&mut self, name: &str, holds: bool) {
        self.record(&format!("check.{name}"), if holds { "pass" } else { "fail" });
        self.checks.push((name.to_string(), holds));
    }

    /// Marks the pipeline as aborted by an error.
    pub fn fail_with(&mut self, error: &Error) {
        self.record("error", error);
        self.error = Some(error.to_string());
    }

    pub fn status(&self) -> Status {
        if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().all(|(_, ok)| *ok) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Every line after the header.
    pub fn body(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out.push_str("status=");
        out.push_str(self.status().as_str());
        out.push('\n');
        out
    }

    pub fn render(&self, generated_at: u64) -> String {
        format!("# generated_at={generated_at}\n{}", self.body())
    }

    pub fn to_json(&self) -> Value {
        let mut map = self.sidecar.clone();
        map.insert("status".into(), Value::String(self.status().as_str().into()));
        Value::Object(map)
    }

    /// Writes `<pipeline>.report` and `<pipeline>.json` into `dir`.
    pub fn write_to(&self, dir: &Path, generated_at: u64) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let stem = self.pipeline.replace(' ', "_");
        let report = dir.join(format!("{stem}.report"));
        std::fs::write(&report, self.render(generated_at)).map_err(|e| io_error(&report, e))?;
        let json = dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(&self.to_json()).expect("serializable report");
        std::fs::write(&json, text + "\n").map_err(|e| io_error(&json, e))?;
        Ok(())
    }
}

pub(crate) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Strips the header line of a rendered report.
pub fn report_body(rendered: &str) -> &str {
    match rendered.strip_prefix("# generated_at=") {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => rendered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_checks() {
        let mut r = Report::new("demo", "x ≤ y");
        r.record("x", 1);
        r.check("bound", true);
        assert_eq!(r.status(), Status::Pass);
        r.check("other", false);
        assert_eq!(r.status(), Status::Fail);
        assert_eq!(r.failed_checks(), ["other"]);
        r.fail_with(&Error::Guard("too big".into()));
        assert_eq!(r.status(), Status::Error);
    }

    #[test]
    fn body_excludes_header() {
        let mut r = Report::new("demo", "a");
        r.record("multi", "one\ntwo");
        let a = r.render(1);
        let b = r.render(2);
        assert_ne!(a, b);
        assert_eq!(report_body(&a), report_body(&b));
        assert!(report_body(&a).contains("multi=one\\ntwo\n"));
        assert_eq!(r.to_json()["status"], "pass");
    }
}
