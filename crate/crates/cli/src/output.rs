//! CSV and JSON emission and CSV ingestion.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! reloaded file reproduces the computed values exactly and repeated runs
//! produce identical bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("cannot write {}: {e}", path.display()))
}

/// Writes a header row followed by numeric rows.
pub fn write_numeric_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Writes string records (header included).
pub fn write_records(path: &Path, records: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for r in records {
        w.write_record(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// A CSV file read back as its header and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a numeric CSV. Empty files, ragged rows and unparsable cells are
/// validation errors.
pub fn read_numeric_csv(path: &Path) -> CliResult<NumericTable> {
    let bad = |msg: String| CliError::Validation(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(bad("empty file".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("row {}: cannot parse {cell:?} as a number", i + 1)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(NumericTable { header, rows })
}

/// Reads a CSV whose first column is text (selftest results).
pub fn read_records(path: &Path) -> CliResult<Vec<Vec<String>>> {
    let bad = |msg: String| CliError::Validation(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let records = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(|e| bad(e.to_string())))
        .collect::<CliResult<Vec<Vec<String>>>>()?;
    if records.is_empty() {
        return Err(bad("empty file".into()));
    }
    Ok(records)
}
