use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;

/// Outcome of one inequality check.
///
/// `threshold` applies to the check's primary measure: `max_ratio` unless the
/// check is decided on `fitted_exponent` (Bernstein slope, band scaling).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub fitted_exponent: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    pub seed: u64,
    /// Decided against a proven bound rather than a fitted constant.
    pub hard: bool,
    pub metadata: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            max_ratio: 0.0,
            fitted_exponent: None,
            threshold: f64::NAN,
            passed: false,
            seed,
            hard: false,
            metadata: BTreeMap::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: f64) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metadata.get(key).copied()
    }
}

pub const REPORT_HEADER: [&str; 7] = ["name", "samples", "max_ratio", "fitted_exponent", "threshold", "passed", "seed"];

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// One row per report, columns as in [`REPORT_HEADER`].
pub fn write_reports_csv(w: impl Write, reports: &[CheckReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REPORT_HEADER)?;
    for r in reports {
        out.write_record([
            r.name.clone(),
            r.samples.to_string(),
            num(r.max_ratio),
            r.fitted_exponent.map(num).unwrap_or_default(),
            num(r.threshold),
            r.passed.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Long-format metadata: `name, key, value`.
pub fn write_metadata_csv(w: impl Write, reports: &[CheckReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "key", "value"])?;
    for r in reports {
        for (k, v) in &r.metadata {
            out.write_record([r.name.as_str(), k.as_str(), &num(*v)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Population standard deviation over mean; 0 for fewer than two values.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if mean == 0.0 {
        return if var == 0.0 { 0.0 } else { f64::INFINITY };
    }
    var.sqrt() / mean.abs()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
