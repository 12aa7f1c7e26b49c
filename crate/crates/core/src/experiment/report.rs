use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scenario};
use crate::{CouplingParams, Error, Result, Warning};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryInfo {
    pub name: String,
    pub version: String,
}

impl LibraryInfo {
    pub fn current() -> Self {
        LibraryInfo {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// A compared quantity and whether it met its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Residual {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Residual {
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Wall-clock information; the only part of a report that may differ
/// between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub criteria_seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub library: LibraryInfo,
    pub scenario: Scenario,
    pub seed: u64,
    pub strict: bool,
    pub config: ExperimentConfig,
    /// Reduced parameters actually used, when the scenario has one point.
    pub parameters: Option<CouplingParams>,
    pub payload: serde_json::Value,
    pub residuals: BTreeMap<String, Residual>,
    pub warnings: Vec<Warning>,
    /// CSV files written, relative to the report.
    pub files: Vec<String>,
    pub timing: Timing,
}

impl Report {
    /// Everything except timing, as JSON.
    pub fn deterministic_view(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Some(map) = v.as_object_mut() {
            map.remove("timing");
        }
        v
    }

    pub fn failed_residuals(&self) -> Vec<String> {
        self.residuals
            .iter()
            .filter(|(_, r)| !r.passed)
            .map(|(k, r)| format!("{k}: {:.3e} > {:.1e}", r.value, r.tolerance))
            .collect()
    }
}

/// Columns of floats with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        CsvTable {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, scientific notation; NaN for undefined cells.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes `<dir>/<name>.csv`. An empty table writes nothing and returns a
/// warning instead.
pub fn emit_plot_data(table: &CsvTable, dir: &Path) -> Result<std::result::Result<String, Warning>> {
    if table.rows.is_empty() {
        return Ok(Err(Warning::EmptyCurve {
            name: table.name.clone(),
        }));
    }
    let file = format!("{}.csv", table.name);
    let path = dir.join(&file);
    fs::write(&path, table.render()).map_err(|e| Error::io(&path, e))?;
    Ok(Ok(file))
}
