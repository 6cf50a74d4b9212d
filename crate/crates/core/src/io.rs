//! CSV input and output, `key = value` text, and number formatting.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::diffusion::Dataset;
use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Reads a numeric CSV. A first row with any non-numeric cell is taken as a
/// header and skipped.
pub fn read_csv_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let file = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(&file, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(&file, e))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = rec.iter().map(str::parse::<f64>).collect();
        if line == 0 && parsed.iter().any(|p| p.is_err()) {
            width = Some(rec.len());
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (col, p) in parsed.into_iter().enumerate() {
            match p {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::Parse {
                        file: file.clone(),
                        row: line + 1,
                        col: col + 1,
                        msg: format!("not a finite number: {:?}", &rec[col]),
                    })
                }
            }
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    file: file.clone(),
                    row: line + 1,
                    col: row.len().min(w) + 1,
                    msg: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => width = Some(row.len()),
        }
        rows.push(row);
    }
    let d = width.unwrap_or(0);
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let (row, msg) = match e.position() {
        Some(p) => (p.line() as usize, e.to_string()),
        None => (0, e.to_string()),
    };
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        _ => Error::Parse {
            file: file.to_string(),
            row,
            col: 0,
            msg,
        },
    }
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    Dataset::new(read_csv_matrix(path)?)
}

/// Row i of every file is sample i.
pub fn load_aligned_csv<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<Dataset>> {
    let sets: Vec<Dataset> = paths.iter().map(|p| load_csv(p.as_ref())).collect::<Result<_>>()?;
    if let Some(first) = sets.first() {
        if let Some(d) = sets.iter().find(|d| d.len() != first.len()) {
            return Err(Error::RowCountMismatch(first.len(), d.len()));
        }
    }
    Ok(sets)
}

/// Comma-separated rows at 17 significant digits with an optional header.
pub fn matrix_to_csv(m: &DMatrix<f64>, header: Option<&[&str]>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, m: &DMatrix<f64>, header: Option<&[&str]>) -> Result<()> {
    fs::write(path, matrix_to_csv(m, header))?;
    Ok(())
}

/// Parses `key = value` lines; `#` starts a comment. Keys must be unique.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}
