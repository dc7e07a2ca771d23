//! CSV and JSON emission with values cut to 9 significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Round to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn sig9_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| sig9(*x)).collect()
}

/// Shortest text that parses back to `sig9(x)`.
pub fn fmt9(x: f64) -> String {
    format!("{}", sig9(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| fmt9(*v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A command result that can be printed either way.
pub trait Report: Serialize {
    fn table(&self) -> Table;
}

pub fn render<R: Report>(report: &R, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(report.table().to_csv()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Numerical(format!("cannot serialize result: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Write to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
