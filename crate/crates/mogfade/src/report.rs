//! Comparison-table output. Every command emits the same CSV schema so
//! analytic values, quadrature oracles, and Monte Carlo estimates can sit
//! side by side:
//!
//! `scenario,metric,abscissa,analytic,oracle,abs_error,std_err`
//!
//! Cells that do not apply stay empty. Files are written to a dot-prefixed
//! temporary sibling and renamed into place, so a failed run never leaves a
//! partial artifact, and a rerun of the same seeded job reproduces the
//! output byte for byte.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: String,
    pub metric: String,
    pub abscissa: f64,
    pub analytic: Option<f64>,
    pub oracle: Option<f64>,
    pub std_err: Option<f64>,
}

impl Row {
    pub fn abs_error(&self) -> Option<f64> {
        match (self.analytic, self.oracle) {
            (Some(a), Some(o)) => Some((a - o).abs()),
            _ => None,
        }
    }
}

pub const CSV_HEADER: &str = "scenario,metric,abscissa,analytic,oracle,abs_error,std_err";

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render_csv(rows: &[Row]) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        for label in [&row.scenario, &row.metric] {
            if label.contains([',', '"', '\n']) {
                return Err(Error::Validation(format!(
                    "CSV labels must not contain commas, quotes, or newlines: {label:?}"
                )));
            }
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.scenario,
            row.metric,
            row.abscissa,
            cell(row.analytic),
            cell(row.oracle),
            cell(row.abs_error()),
            cell(row.std_err),
        ));
    }
    Ok(out)
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    write_atomic(path, render_csv(rows)?.as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serializing {}: {e}", path.display())))?;
    body.push('\n');
    write_atomic(path, body.as_bytes())
}

/// Write-then-rename within the destination directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(metric: &str, x: f64, a: Option<f64>, o: Option<f64>) -> Row {
        Row {
            scenario: "s".into(),
            metric: metric.into(),
            abscissa: x,
            analytic: a,
            oracle: o,
            std_err: None,
        }
    }

    #[test]
    fn renders_blank_cells_and_abs_error() {
        let rows = vec![
            row("outage", 1.5, Some(0.25), Some(0.25000001)),
            row("capacity", 2.0, None, Some(1.0)),
        ];
        let text = render_csv(&rows).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("s,outage,1.5,0.25,0.25000001,"));
        assert_eq!(lines[2], "s,capacity,2,,1,,");
    }

    #[test]
    fn rejects_labels_that_break_the_format() {
        let bad = Row {
            scenario: "a,b".into(),
            ..row("m", 0.0, None, None)
        };
        assert!(render_csv(&[bad]).is_err());
    }

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
