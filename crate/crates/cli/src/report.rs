//! Machine-readable report documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REPORT_VERSION: &str = concat!("kmn-report/1 ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    MismatchAdjudicated,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::MismatchAdjudicated => "mismatch-adjudicated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub deviation: Option<f64>,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status,
            deviation: None,
            detail: detail.into(),
        }
    }

    pub fn with_deviation(mut self, d: f64) -> Self {
        self.deviation = d.is_finite().then_some(d);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub xi_t: String,
    pub xi_x: String,
    pub eta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsDoc {
    pub r: String,
    pub z: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub case: String,
    pub generators: Vec<GeneratorDoc>,
    pub invariants: Option<InvariantsDoc>,
    pub reduced_ode: Option<String>,
    pub checks: Vec<CheckRecord>,
    pub config: BTreeMap<String, String>,
    pub version: String,
}

impl ReportDoc {
    pub fn new(case: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        ReportDoc {
            case: case.into(),
            generators: Vec::new(),
            invariants: None,
            reduced_ode: None,
            checks: Vec::new(),
            config,
            version: REPORT_VERSION.to_string(),
        }
    }

    /// 0 when every check passes, 2 when a mismatch was adjudicated, 1 when
    /// any check fails.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self.checks.iter().any(|c| c.status == Status::MismatchAdjudicated) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "case {}", self.case).ok();
        for (i, g) in self.generators.iter().enumerate() {
            writeln!(w, "  X{i}: xi_t = {}, xi_x = {}, eta = {}", g.xi_t, g.xi_x, g.eta).ok();
        }
        if let Some(inv) = &self.invariants {
            writeln!(w, "  r = {}, z = {}", inv.r, inv.z).ok();
        }
        if let Some(ode) = &self.reduced_ode {
            writeln!(w, "  reduced: {ode} = 0").ok();
        }
        for c in &self.checks {
            write!(w, "  [{}] {}", c.status.label(), c.name).ok();
            if let Some(d) = c.deviation {
                write!(w, " (deviation {d:.3e})").ok();
            }
            if !c.detail.is_empty() {
                write!(w, ": {}", c.detail).ok();
            }
            writeln!(w).ok();
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// Writes the document to `path` (when given) and returns the human summary.
pub fn emit_report(doc: &ReportDoc, path: Option<&Path>) -> Result<String, ReportError> {
    if let Some(p) = path {
        std::fs::write(p, doc.to_json()).map_err(|source| ReportError::Io {
            path: p.display().to_string(),
            source,
        })?;
    }
    Ok(doc.summary())
}

pub fn read_report(path: &Path) -> Result<ReportDoc, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ReportError::Json {
        path: path.display().to_string(),
        source,
    })
}
