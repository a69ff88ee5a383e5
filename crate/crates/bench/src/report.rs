//! CSV rows `mode,size,update,method,metric,value` with C-style `%.6e` values.

use crate::error::{BenchError, Result};
use std::io::Write;
use std::path::Path;

pub const HEADER: [&str; 6] = ["mode", "size", "update", "method", "metric", "value"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub mode: String,
    pub size: usize,
    pub update: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
}

impl Row {
    pub fn new(mode: &str, size: usize, update: &str, method: &str, metric: &str, value: f64) -> Self {
        Self {
            mode: mode.into(),
            size,
            update: update.into(),
            method: method.into(),
            metric: metric.into(),
            value,
        }
    }
}

/// Formats like C's `%.6e`: `1.234560e+02`, `-5.000000e-07`, `inf`, `nan`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let size = r.size.to_string();
        let value = format_sci(r.value);
        w.write_record([&r.mode, &size, &r.update, &r.method, &r.metric, &value])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, rows: &[Row]) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|source| BenchError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            write_rows(std::io::BufWriter::new(file), rows)
        }
        None => write_rows(std::io::stdout().lock(), rows),
    }
}
