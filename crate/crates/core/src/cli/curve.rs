use std::path::{Path, PathBuf};

use super::runner::CSV_HEADER;
use super::CliError;

/// One plotted point: the best restart at a sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: String,
    pub learned: String,
    /// Empty when the run had no reference.
    pub reference: String,
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize, CliError> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        CliError::Config(vec![super::Diagnostic::general(format!(
            "{}: missing column '{name}'",
            path.display()
        ))])
    })
}

pub fn read_curve(csv_path: &Path) -> Result<Vec<CurvePoint>, CliError> {
    let mut r = csv::Reader::from_path(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let headers = r.headers().map_err(|e| CliError::io(csv_path, e))?.clone();
    let x = column(&headers, CSV_HEADER[3], csv_path)?;
    let learned = column(&headers, CSV_HEADER[7], csv_path)?;
    let reference = column(&headers, CSV_HEADER[8], csv_path)?;
    let best = column(&headers, CSV_HEADER[10], csv_path)?;
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::io(csv_path, e))?;
        if &rec[best] == "true" {
            points.push(CurvePoint {
                x: rec[x].to_string(),
                learned: rec[learned].to_string(),
                reference: rec[reference].to_string(),
            });
        }
    }
    Ok(points)
}

/// `results*.csv` → `curve*.csv` alongside it; other names get a `_curve` suffix.
pub fn default_curve_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let name = match stem.strip_prefix("results") {
        Some(rest) => format!("curve{rest}.csv"),
        None => format!("{stem}_curve.csv"),
    };
    csv_path.with_file_name(name)
}

/// Writes `x, learned, reference` for every best-restart row.
pub fn emit_curve(csv_path: &Path, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let points = read_curve(csv_path)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| default_curve_path(csv_path));
    let mut w = csv::Writer::from_path(&out).map_err(|e| CliError::io(&out, e))?;
    w.write_record(["x", "learned", "reference"]).map_err(|e| CliError::io(&out, e))?;
    for p in &points {
        w.write_record([&p.x, &p.learned, &p.reference]).map_err(|e| CliError::io(&out, e))?;
    }
    w.flush().map_err(|e| CliError::io(&out, e))?;
    Ok(out)
}
