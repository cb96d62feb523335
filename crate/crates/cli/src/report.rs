//! Check records, CSV tables and the per-experiment summary.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

use scaledgauge_core::convergence::ConvergenceFit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "==")]
    Equal,
}

/// One pass/fail record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    /// `observed ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected: 0.0,
            tolerance,
            relation: Relation::AtMost,
            pass: observed <= tolerance,
        }
    }

    /// `observed ≥ bound`.
    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected: bound,
            tolerance: 0.0,
            relation: Relation::AtLeast,
            pass: observed >= bound,
        }
    }

    /// `observed > bound`.
    pub fn above(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected: bound,
            tolerance: 0.0,
            relation: Relation::Above,
            pass: observed > bound,
        }
    }

    /// Exact equality, e.g. a mismatch count against zero.
    pub fn exact(name: impl Into<String>, observed: f64, expected: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance: 0.0,
            relation: Relation::Equal,
            pass: observed == expected,
        }
    }

    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self::exact(name, if holds { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: ConvergenceFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

/// Formats a float with its shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub fits: Vec<NamedFit>,
    pub notes: Map<String, Value>,
    pub tables: Vec<Table>,
    pub duration: Duration,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            checks: Vec::new(),
            fits: Vec::new(),
            notes: Map::new(),
            tables: Vec::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn fit(&mut self, name: &str, fit: ConvergenceFit) {
        self.fits.push(NamedFit { name: name.to_string(), fit });
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.notes.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn summary(&self) -> Value {
        serde_json::json!({
            "experiment": self.experiment,
            "pass": self.passed(),
            "checks": self.checks,
            "fits": self.fits,
            "notes": self.notes,
            "tables": self.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
            "duration_seconds": self.duration.as_secs_f64(),
        })
    }

    /// Writes `<out>/<experiment>/summary.json` and one CSV per table.
    pub fn write(&self, out: &Path) -> io::Result<PathBuf> {
        let dir = out.join(&self.experiment);
        fs::create_dir_all(&dir)?;
        for t in &self.tables {
            t.write(&dir.join(format!("{}.csv", t.name)))?;
        }
        let text = serde_json::to_string_pretty(&self.summary())?;
        fs::write(dir.join("summary.json"), text + "\n")?;
        Ok(dir)
    }
}
