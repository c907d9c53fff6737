//! Output directory handling: CSV tables, SVG plots and the metadata sidecar.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use crate::config::{ExperimentSpec, Resolved};
use crate::error::{ExperimentError, Result};

/// Name of the metadata sidecar written into every output directory.
pub const METADATA_FILE: &str = "metadata.json";

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Cell {
    /// Deterministic rendering: shortest round-trip form for floats.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Cell {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

/// A named table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Writer for one run's output directory.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    plot: bool,
    files: Vec<String>,
    started: Instant,
}

impl Artifacts {
    pub fn create(spec: &ExperimentSpec) -> Result<Artifacts> {
        std::fs::create_dir_all(&spec.out_dir).map_err(|e| ExperimentError::io(&spec.out_dir, e))?;
        Ok(Artifacts {
            dir: spec.out_dir.clone(),
            plot: spec.plot,
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn plotting(&self) -> bool {
        self.plot
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(&table.header)?;
        for row in &table.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush().map_err(|e| ExperimentError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// Writes an SVG when plotting is enabled; otherwise does nothing.
    pub fn write_svg(&mut self, name: &str, render: impl FnOnce() -> String) -> Result<Option<PathBuf>> {
        if !self.plot {
            return Ok(None);
        }
        let path = self.dir.join(name);
        std::fs::write(&path, render()).map_err(|e| ExperimentError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(Some(path))
    }

    /// Writes the metadata sidecar and returns the list of files produced.
    pub fn finish(mut self, spec: &ExperimentSpec, resolved: &Resolved, extra: Value) -> Result<Vec<PathBuf>> {
        self.files.push(METADATA_FILE.to_string());
        let meta = json!({
            "experiment": spec.kind.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "units": "recoil units: hbar = k0 = E0 = 1, m = 1/2",
            "parameters": resolved.values(),
            "inferred_defaults": resolved.inferred,
            "workers": spec.workers,
            "seed": Value::Null,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "files": self.files,
            "details": extra,
        });
        let path = self.dir.join(METADATA_FILE);
        let text = serde_json::to_string_pretty(&meta)?;
        std::fs::write(&path, text + "\n").map_err(|e| ExperimentError::io(&path, e))?;
        Ok(self.files.iter().map(|f| self.dir.join(f)).collect())
    }
}

/// File-name friendly rendering of a parameter value: `-0.5` → `m0.5`.
pub fn tag(x: f64) -> String {
    let s = format!("{x}");
    match s.strip_prefix('-') {
        Some(rest) => format!("m{rest}"),
        None => s,
    }
}
