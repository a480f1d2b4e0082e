//! Tabular sweep results and their CSV form.
//!
//! A sweep file holds one or more series sharing the same axes. Series
//! metadata (labels, regime flags) travels in `#`-prefixed header lines;
//! data rows have exactly the columns `series_label,x,y`. Numbers are
//! written in scientific notation with 17 significant digits so a parsed
//! file reproduces the original values bit-exactly.

use std::path::Path;

use crate::error::{Error, Result};

/// One (x, y) series of an analytic or Monte-Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub series_label: String,
    pub x_label: String,
    pub y_label: String,
    /// Points with strictly increasing x.
    pub points: Vec<(f64, f64)>,
    /// Free-form flags, e.g. no-switching regime markers.
    pub metadata: Vec<String>,
}

impl SweepSeries {
    pub fn new(
        series_label: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            series_label: series_label.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for text in [&self.series_label, &self.x_label, &self.y_label]
            .into_iter()
            .chain(self.metadata.iter())
        {
            if text.contains(',') || text.contains('\n') || text.contains('\r') {
                return Err(Error::BadSeriesLabel(text.clone()));
            }
        }
        for (index, pair) in self.points.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::NonMonotonicSweep {
                    label: self.series_label.clone(),
                    index: index + 1,
                });
            }
        }
        Ok(())
    }
}

/// `n` logarithmically spaced values over `[lo, hi]`, inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Serialize series to CSV text.
pub fn emit_csv(series: &[SweepSeries]) -> Result<String> {
    let mut out = String::new();
    for s in series {
        s.validate()?;
        out.push_str(&format!("# series: {}\n", s.series_label));
        out.push_str(&format!("# x_label: {}\n", s.x_label));
        out.push_str(&format!("# y_label: {}\n", s.y_label));
        for flag in &s.metadata {
            out.push_str(&format!("# flag: {flag}\n"));
        }
    }
    out.push_str("series_label,x,y\n");
    for s in series {
        for &(x, y) in &s.points {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", s.series_label, x, y));
        }
    }
    Ok(out)
}

/// Parse CSV text produced by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepSeries>> {
    let mut series: Vec<SweepSeries> = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(label) = comment.strip_prefix("series:") {
                series.push(SweepSeries::new(label.trim(), "", ""));
            } else if let Some(v) = comment.strip_prefix("x_label:") {
                let s = series.last_mut().ok_or(Error::CsvParse {
                    line: lineno,
                    message: "x_label before any series".into(),
                })?;
                s.x_label = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("y_label:") {
                let s = series.last_mut().ok_or(Error::CsvParse {
                    line: lineno,
                    message: "y_label before any series".into(),
                })?;
                s.y_label = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("flag:") {
                let s = series.last_mut().ok_or(Error::CsvParse {
                    line: lineno,
                    message: "flag before any series".into(),
                })?;
                s.metadata.push(v.trim().to_string());
            }
            continue;
        }
        if !seen_header {
            if line != "series_label,x,y" {
                return Err(Error::CsvParse {
                    line: lineno,
                    message: format!("expected header 'series_label,x,y', got '{line}'"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::CsvParse {
                line: lineno,
                message: format!("expected 3 columns, got {}", fields.len()),
            });
        }
        let x: f64 = fields[1].parse().map_err(|e| Error::CsvParse {
            line: lineno,
            message: format!("bad x '{}': {e}", fields[1]),
        })?;
        let y: f64 = fields[2].parse().map_err(|e| Error::CsvParse {
            line: lineno,
            message: format!("bad y '{}': {e}", fields[2]),
        })?;
        let s = series
            .iter_mut()
            .find(|s| s.series_label == fields[0])
            .ok_or_else(|| Error::CsvParse {
                line: lineno,
                message: format!("row references undeclared series '{}'", fields[0]),
            })?;
        s.points.push((x, y));
    }
    if !seen_header {
        return Err(Error::CsvParse {
            line: text.lines().count(),
            message: "missing 'series_label,x,y' header".into(),
        });
    }
    Ok(series)
}

/// Write series to a CSV file atomically.
pub fn write_csv(path: &Path, series: &[SweepSeries]) -> Result<()> {
    let text = emit_csv(series)?;
    crate::io::write_atomic(path, text.as_bytes())?;
    Ok(())
}
