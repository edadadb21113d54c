//! CSV artifacts with `#`-prefixed provenance comments.
//!
//! Numbers are written with 17 significant digits in scientific notation
//! and a `.` decimal separator; records follow RFC 4180 (via `csv`).

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// A cell of a CSV record.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// One invariant checked by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The result table of an experiment plus the invariants it checked.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Render the CSV: provenance comments, notes, header, records.
    pub fn to_csv(&self, experiment: &str, config: &ExperimentConfig) -> String {
        let toml = config.to_toml();
        let hash = Sha256::digest(toml.as_bytes());
        let mut out = String::new();
        out.push_str(&format!("# tool: causalab {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# experiment: {experiment}\n"));
        out.push_str(&format!("# config-sha256: {hash:x}\n"));
        for line in toml.lines().filter(|l| !l.is_empty()) {
            out.push_str(&format!("# config: {line}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("# check {}: {} ({})\n", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("utf-8 records"));
        out
    }
}
