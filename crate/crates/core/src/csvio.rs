//! CSV point-cloud formats: `re,im` for flat clouds and `re,im,layer` for
//! limit sets. Floats are written with the shortest round-trip decimal form.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::limit::LimitSet;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse point from {content:?}")]
    Parse { line: usize, content: String },
    #[error("no points in file")]
    Empty,
}

pub fn points_to_csv(points: &[Complex64]) -> String {
    let mut out = String::with_capacity(16 * points.len() + 8);
    out.push_str("re,im\n");
    for z in points {
        out.push_str(&format!("{:?},{:?}\n", z.re, z.im));
    }
    out
}

pub fn write_points_csv(path: &Path, points: &[Complex64]) -> Result<(), CsvError> {
    fs::write(path, points_to_csv(points))?;
    Ok(())
}

pub fn parse_points_csv(text: &str) -> Result<Vec<Complex64>, CsvError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let re = parts.next().map(str::trim);
        let im = parts.next().map(str::trim);
        match (
            re.and_then(|s| s.parse::<f64>().ok()),
            im.and_then(|s| s.parse::<f64>().ok()),
        ) {
            (Some(re), Some(im)) => points.push(Complex64::new(re, im)),
            _ if idx == 0 => {} // header row
            _ => {
                return Err(CsvError::Parse {
                    line: idx + 1,
                    content: raw.to_string(),
                })
            }
        }
    }
    Ok(points)
}

pub fn read_points_csv(path: &Path) -> Result<Vec<Complex64>, CsvError> {
    parse_points_csv(&fs::read_to_string(path)?)
}

/// `re,im,layer` rows: layer 0 is the pixel set itself, layer `j` its j-th
/// preimage layer, layer -1 the circle samples.
pub fn limit_set_to_csv(set: &LimitSet) -> String {
    let mut out = String::with_capacity(20 * set.points.len() + 16);
    out.push_str("re,im,layer\n");
    for (z, layer) in set.points.iter().zip(&set.layers) {
        out.push_str(&format!("{:?},{:?},{}\n", z.re, z.im, layer));
    }
    out
}

pub fn write_limit_set_csv(path: &Path, set: &LimitSet) -> Result<(), CsvError> {
    fs::write(path, limit_set_to_csv(set))?;
    Ok(())
}
