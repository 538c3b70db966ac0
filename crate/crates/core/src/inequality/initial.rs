//! Weighted series of the initial data,
//! `sum_{k >= k0} sum_{j >= 1} ||D^s P_j u0||_k^k / 2^{B (1 - 1/sqrt k) k}`,
//! against `2^{-B/4}`.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::littlewood_paley::max_resolvable_band;
use crate::norms::{band_magnitude, lq_norms};
use crate::ns::VelocityState;

pub const INITIAL_K0: u32 = 100;

/// `ln ||D^sigma P_j u0||_k` for `j = 1..=J` (rows) and `k = k0..=k_max` (columns).
fn log_norm_table(u0: &VelocityState, k_max: u32, sigma: u32) -> Result<Vec<Vec<f64>>> {
    let ks: Vec<f64> = (INITIAL_K0..=k_max).map(f64::from).collect();
    (1..=max_resolvable_band(u0.grid()))
        .into_par_iter()
        .map(|j| {
            let mag = band_magnitude(u0, j, sigma);
            Ok(lq_norms(&mag, &ks)?.iter().map(|n| n.log_value).collect())
        })
        .collect()
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `(ln total, ln of the largest k = k_max term)` at weight parameter `b`.
fn log_series(table: &[Vec<f64>], b: f64) -> (f64, f64) {
    let term = |row: &[f64], c: usize| {
        let k = f64::from(INITIAL_K0) + c as f64;
        k * row[c] - b * (1.0 - 1.0 / k.sqrt()) * k * LN_2
    };
    let total = log_sum_exp(table.iter().flat_map(|row| (0..row.len()).map(move |c| term(row, c))));
    let last = log_sum_exp(table.iter().map(|row| term(row, row.len() - 1)));
    (total, last)
}

/// Smallest `B` in `b_grid` whose series is at most `2^{-B/4}`, in
/// metadata as `b_tilde` (NaN when none passes). `max_ratio` is `series /
/// 2^{-B/4}` at that `B`, or at the largest `B` otherwise. The flag
/// `truncation_warning` is set when the `k_max` terms exceed 1e-30 of the sum.
pub fn check_initial_series_bound(u0: &VelocityState, b_grid: &[f64], k_max: u32, sigma: u32) -> Result<CheckReport> {
    if k_max < INITIAL_K0 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: format!("k_max={k_max} below k0={INITIAL_K0}"),
        });
    }
    if b_grid.is_empty() || b_grid.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "b_grid",
            reason: "need a nonempty grid of positive B".into(),
        });
    }
    let mut bs = b_grid.to_vec();
    bs.sort_by(f64::total_cmp);
    let table = log_norm_table(u0, k_max, sigma)?;
    let mut r = CheckReport::new("initial_series", 0);
    r.samples = bs.len();
    r.threshold = 1.0;
    r.hard = true;
    let log_ratio = |b: f64| log_series(&table, b).0 + 0.25 * b * LN_2;
    let chosen = bs.iter().copied().find(|&b| log_ratio(b) <= 0.0);
    let b = chosen.unwrap_or(bs[bs.len() - 1]);
    let (total, last) = log_series(&table, b);
    let tail = if total == f64::NEG_INFINITY { 0.0 } else { (last - total).exp() };
    r.max_ratio = log_ratio(b).exp();
    r.meta("tail_fraction", tail);
    r.meta("truncation_warning", if tail > 1e-30 { 1.0 } else { 0.0 });
    r.meta("log_series", total);
    r.passed = chosen.is_some();
    r.meta("b_tilde", chosen.unwrap_or(f64::NAN));
    r.meta("k_max", f64::from(k_max));
    r.meta("sigma", f64::from(sigma));
    Ok(r)
}
