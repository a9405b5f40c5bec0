use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::CurvePoint;

const BASE_COLUMNS: [&str; 8] = [
    "n",
    "abscissa",
    "trials",
    "degenerate",
    "feasible_count",
    "proportion",
    "half_width",
    "smoothed_proportion",
];

/// Curve rows in the fixed column order, followed by any extra columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub extra_columns: Vec<String>,
    pub rows: Vec<(usize, CurvePoint, f64, Vec<f64>)>,
}

impl CsvTable {
    pub fn new(extra: &[&str]) -> Self {
        Self {
            extra_columns: extra.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, n: usize, point: &CurvePoint, smoothed: f64, extra: Vec<f64>) {
        debug_assert_eq!(extra.len(), self.extra_columns.len());
        self.rows.push((n, *point, smoothed, extra));
    }

    pub fn header(&self) -> String {
        BASE_COLUMNS
            .iter()
            .copied()
            .chain(self.extra_columns.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn render(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        for (n, p, smoothed, extra) in &self.rows {
            let _ = write!(
                s,
                "{n},{},{},{},{},{},{},{}",
                fmt_num(p.abscissa),
                p.trials,
                p.degenerate,
                p.feasible_count,
                fmt_num(p.proportion),
                fmt_num(p.half_width),
                fmt_num(*smoothed)
            );
            for v in extra {
                s.push(',');
                s.push_str(&fmt_num(*v));
            }
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip representation; `NaN` for missing values.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_csv(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
