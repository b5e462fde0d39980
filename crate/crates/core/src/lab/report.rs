//! Experiment reports and their deterministic CSV/JSON encodings.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::fit::FitOutcome;
use crate::mollify::{ConeScalingReport, ConvolutionSlopeReport};
use crate::theory::{Exponent, ExponentReport, ZoneLedger};

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// CSV text: floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Exponent> for Cell {
    fn from(v: Exponent) -> Self {
        match v {
            Exponent::Finite(x) => Cell::Float(x),
            Exponent::Unbounded => Cell::Text("unbounded".into()),
        }
    }
}

/// Row-major table with named columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; the length must match the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row length does not match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column values.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }
}

/// How a failed check maps to the process outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Failure means the inputs violate a hypothesis.
    Admissibility,
    /// Failure means a numerical verification did not hold.
    Numeric,
    /// Reported only.
    Informational,
}

/// A named pass/fail verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, kind: CheckKind, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            kind,
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.passed, self.kind) {
            (true, _) => "PASS",
            (false, CheckKind::Informational) => "NOTE",
            (false, _) => "FAIL",
        };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Fitted `E_min ∝ h^{exponent}` for one `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GseFit {
    pub s: f64,
    pub fit: FitOutcome,
    /// `−2s/(2 − s)`.
    pub predicted: f64,
    pub relative_error: f64,
}

/// Experiment-specific results beyond the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Summary {
    Exponents {
        report: ExponentReport,
        ledger: Option<ZoneLedger>,
    },
    TraceNeg {
        warnings: Vec<String>,
    },
    Classical {
        /// `∫[V]_-^{1+d/2} dx`.
        phase_space_volume: f64,
        l_cl: f64,
    },
    Weyl {
        /// `h^d × classical`, independent of `h`.
        scaled_classical: f64,
        fit: FitOutcome,
        warnings: Vec<String>,
    },
    Relative {
        /// `L^cl ∫W₁`.
        classical_relative: f64,
        exponents: ExponentReport,
        eta_star: Exponent,
        fit: FitOutcome,
        monotone: bool,
        warnings: Vec<String>,
    },
    GseScaling {
        fits: Vec<GseFit>,
    },
    ImsCheck {
        max_defect: f64,
        max_members: usize,
    },
    MollifySlopes {
        smooth: ConvolutionSlopeReport,
        kink: ConvolutionSlopeReport,
        cone: ConeScalingReport,
    },
}

/// Complete output of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: ExperimentKind,
    /// Effective configuration, defaults resolved.
    pub config: ExperimentConfig,
    pub table: Table,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl Report {
    /// CSV of the table, one header line plus one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let line: Vec<String> = row.iter().map(|c| csv_field(&c.to_csv())).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Pretty JSON of the whole report with fields in declaration order.
    ///
    /// # Errors
    ///
    /// [`Error::Numeric`] if a table cell is not finite, since JSON has no
    /// encoding for it that would round-trip.
    pub fn to_json(&self) -> Result<String> {
        if let Some(v) = self.table.rows.iter().flatten().find_map(|c| match c {
            Cell::Float(v) if !v.is_finite() => Some(*v),
            _ => None,
        }) {
            return Err(Error::Numeric(format!(
                "table holds the non-finite value {v}"
            )));
        }
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::Numeric(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn encode(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<experiment>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(format!("{}.{}", self.experiment.name(), format.extension()));
        let text = self.encode(format)?;
        std::fs::write(&path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    /// `Err` for the first failed admissibility or numeric check.
    pub fn outcome(&self) -> Result<()> {
        for c in &self.checks {
            if c.passed {
                continue;
            }
            match c.kind {
                CheckKind::Admissibility => {
                    return Err(Error::Admissibility(format!("{}: {}", c.name, c.detail)))
                }
                CheckKind::Numeric => {
                    return Err(Error::Numeric(format!("{}: {}", c.name, c.detail)))
                }
                CheckKind::Informational => {}
            }
        }
        Ok(())
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
