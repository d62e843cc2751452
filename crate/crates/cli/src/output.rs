//! Deterministic CSV and JSON writers.
//!
//! Floats print with 17 significant digits (round-trip exact), booleans as
//! `true`/`false`, missing values as empty fields. JSON refuses NaN and
//! infinities outright.

use crate::{CliError, CliResult};
use std::fmt::Write as _;

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub struct CsvWriter {
    buf: String,
    columns: usize,
    rows: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        CsvWriter {
            buf,
            columns: header.len(),
            rows: 0,
        }
    }

    pub fn row(&mut self, cells: &[Cell]) -> CliResult<()> {
        assert_eq!(cells.len(), self.columns, "ragged CSV row");
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                Cell::Float(v) => {
                    ensure_finite(*v)?;
                    let _ = write!(self.buf, "{}", fmt_float(*v));
                }
                Cell::Int(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                Cell::Bool(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                Cell::Text(t) => {
                    let _ = write!(self.buf, "{t}");
                }
                Cell::Empty => {}
            }
        }
        self.buf.push('\n');
        self.rows += 1;
        Ok(())
    }

    pub fn write(self, path: &str) -> CliResult<usize> {
        std::fs::write(path, self.buf).map_err(CliError::from)?;
        Ok(self.rows)
    }
}

pub fn ensure_finite(v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Numerical(format!(
            "non-finite value {v} cannot be emitted"
        )))
    }
}

/// Serialize to pretty JSON and write; the value must already be free of
/// non-finite floats (serde_json would silently turn them into null).
pub fn write_json<T: serde::Serialize>(path: &str, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
    if text.contains(": null") {
        return Err(CliError::Numerical(
            "non-finite value leaked into the JSON report".into(),
        ));
    }
    std::fs::write(path, text + "\n").map_err(CliError::from)?;
    Ok(())
}
