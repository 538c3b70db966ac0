//! Projection bounds, the cheap Littlewood-Paley inequality, Bernstein's
//! inequality and the gradient equivalence on a band.

use std::f64::consts::PI;

use super::kernel::continuum_band_kernel_l1;
use super::report::{coefficient_of_variation, fit_slope, CheckReport};
use super::{par_samples, FieldGenerator};
use crate::error::{Error, Result};
use crate::littlewood_paley::{band_kernel_l1, decompose, max_resolvable_band, project_band};
use crate::norms::{dsigma_magnitude, lq_norm};
use crate::spectral::{inverse_transform_real, Grid, SpectralField};

pub(crate) fn norm_of(f: &SpectralField, q: f64) -> Result<f64> {
    Ok(lq_norm(&inverse_transform_real(f), q)?.value())
}

fn check_q(q: f64) -> Result<()> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidExponent(q));
    }
    Ok(())
}

fn check_band_range(grid: Grid, lo: i32, hi: i32) -> Result<()> {
    if lo > hi || lo < 0 || hi > max_resolvable_band(grid) {
        return Err(Error::BandRange {
            j_min: lo,
            j_max: hi,
            n: grid.n(),
            reason: "bands must satisfy 0 <= j_min <= j_max <= log2(n/2) + 1",
        });
    }
    Ok(())
}

/// `max ||P_j f||_q / ||f||_q` against the continuum kernel norm `||psi_check||_1`.
pub fn check_projection_bound(gen: &FieldGenerator, grid: Grid, q: f64, j: i32, samples: usize) -> Result<CheckReport> {
    check_q(q)?;
    check_band_range(grid, j, j)?;
    let ratios = par_samples(samples, 0, |i| {
        let f = gen.sample(grid, i)?;
        let whole = norm_of(&f, q)?;
        if whole == 0.0 {
            return Ok(None);
        }
        Ok(Some(norm_of(&project_band(&f, j), q)? / whole))
    })?;
    let measured: Vec<f64> = ratios.iter().flatten().copied().collect();
    let mut r = CheckReport::new("projection", gen.seed);
    r.samples = measured.len();
    r.hard = true;
    r.threshold = continuum_band_kernel_l1();
    r.max_ratio = measured.iter().copied().fold(0.0, f64::max);
    r.passed = r.max_ratio <= r.threshold;
    r.meta("skipped", (samples - measured.len()) as f64);
    r.meta("min_ratio", measured.iter().copied().fold(f64::INFINITY, f64::min));
    r.meta("lattice_kernel_l1", band_kernel_l1(grid, j));
    r.meta("q", q);
    r.meta("j", j as f64);
    Ok(r)
}

/// `sup_j ||P_j f||_q <= C ||f||_q` and `||f||_q <= ||P_{<=0} f||_q + sum_j ||P_j f||_q`
/// over all resolvable bands.
///
/// `max_ratio` is the largest `||f||_q / (sum of pieces)`, bounded by 1 through
/// the triangle inequality; the sup side is compared with `||psi_check||_1`.
pub fn check_cheap_lp(gen: &FieldGenerator, grid: Grid, q: f64, samples: usize) -> Result<CheckReport> {
    check_q(q)?;
    let top = max_resolvable_band(grid);
    let rows = par_samples(samples, 0, |i| {
        let f = gen.sample(grid, i)?;
        let d = decompose(&f, 1, top)?;
        let whole = norm_of(&f, q)?;
        let low = norm_of(&d.low_pass, q)?;
        let bands = d.bands.iter().map(|b| norm_of(b, q)).collect::<Result<Vec<_>>>()?;
        let sum = low + bands.iter().sum::<f64>();
        let sup = bands.iter().copied().fold(0.0, f64::max);
        Ok((whole, sum, sup))
    })?;
    let constant = continuum_band_kernel_l1();
    let mut r = CheckReport::new("cheap_lp", gen.seed);
    r.hard = true;
    r.threshold = 1.0;
    let (mut right, mut left) = (0.0f64, 0.0f64);
    let mut zero = 0;
    for &(whole, sum, sup) in &rows {
        if whole == 0.0 {
            zero += 1;
            continue;
        }
        right = right.max(whole / sum);
        left = left.max(sup / whole);
    }
    r.samples = rows.len();
    r.max_ratio = right;
    r.passed = right <= 1.0 + 1e-12 && left <= constant;
    r.meta("sup_ratio", left);
    r.meta("sup_threshold", constant);
    r.meta("margin", 1.0 - right);
    r.meta("zero_fields", zero as f64);
    r.meta("q", q);
    Ok(r)
}

/// Sup over samples of `||P_j f||_{q'} / ||P_j f||_q` for each band, from
/// samples `offset .. offset + samples`.
fn bernstein_sups(gen: &FieldGenerator, grid: Grid, q: f64, qp: f64, bands: &[i32], samples: usize, offset: u64) -> Result<Vec<f64>> {
    bands
        .iter()
        .map(|&j| {
            let g = gen.with_band(j);
            let ratios = par_samples(samples, offset, |i| {
                let pf = project_band(&g.sample(grid, i)?, j);
                let low = norm_of(&pf, q)?;
                if low == 0.0 {
                    return Ok(None);
                }
                Ok(Some(norm_of(&pf, qp)? / low))
            })?;
            let sup = ratios.iter().flatten().copied().fold(f64::NAN, f64::max);
            if sup.is_nan() {
                return Err(Error::EmptyBand(j));
            }
            Ok(sup)
        })
        .collect()
}

/// Bernstein's inequality: fits the slope of `log2` of the sup ratio against
/// `j` and the per-band constant `ratio / 2^{j(3/q - 3/q')}` on two disjoint
/// sample sets. Passes when the slope stays within 0.15 of `3/q - 3/q'` from
/// above and the constants have coefficient of variation below 0.5.
pub fn check_bernstein(
    gen: &FieldGenerator,
    grid: Grid,
    q: f64,
    q_prime: f64,
    j_range: (i32, i32),
    samples: usize,
) -> Result<CheckReport> {
    check_q(q)?;
    if !(q_prime >= q) {
        return Err(Error::InvalidParameter {
            name: "q_prime",
            reason: format!("need q <= q', got q={q}, q'={q_prime}"),
        });
    }
    check_band_range(grid, j_range.0, j_range.1)?;
    let bands: Vec<i32> = (j_range.0..=j_range.1).collect();
    let first = bernstein_sups(gen, grid, q, q_prime, &bands, samples, 0)?;
    let second = bernstein_sups(gen, grid, q, q_prime, &bands, samples, samples as u64)?;
    let target = 3.0 / q - 3.0 / q_prime;
    let sups: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a.max(*b)).collect();
    let xs: Vec<f64> = bands.iter().map(|&j| j as f64).collect();
    let logs: Vec<f64> = sups.iter().map(|s| s.log2()).collect();
    let slope = if bands.len() > 1 { fit_slope(&xs, &logs) } else { 0.0 };
    let per_j = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(&bands)
            .map(|(s, &j)| s / 2f64.powf(j as f64 * target))
            .collect()
    };
    let mut all = per_j(&first);
    all.extend(per_j(&second));
    let cov = coefficient_of_variation(&all);
    let mut r = CheckReport::new("bernstein", gen.seed);
    r.samples = 2 * samples * bands.len();
    r.fitted_exponent = Some(slope);
    r.threshold = target + 0.15;
    r.max_ratio = all.iter().copied().fold(0.0, f64::max);
    r.passed = slope <= r.threshold && cov < 0.5;
    r.meta("target_slope", target);
    r.meta("constant_cov", cov);
    r.meta("fitted_constant", r.max_ratio);
    for (j, s) in bands.iter().zip(&sups) {
        r.meta(&format!("sup_ratio_j{j}"), *s);
    }
    Ok(r)
}

/// `r = ||grad P_j f||_q / (2^j ||P_j f||_q)` over bands and samples. At
/// `q = 2` the multiplier confines `r` to `[pi, 4 pi]`; other exponents only
/// require `max r / min r <= 8 pi`.
pub fn check_gradient_equivalence(
    gen: &FieldGenerator,
    grid: Grid,
    q: f64,
    j_range: (i32, i32),
    samples: usize,
) -> Result<CheckReport> {
    check_q(q)?;
    check_band_range(grid, j_range.0, j_range.1)?;
    let mut measured = Vec::new();
    let mut skipped = 0;
    for j in j_range.0..=j_range.1 {
        let g = gen.with_band(j);
        let rs = par_samples(samples, 0, |i| {
            let pf = project_band(&g.sample(grid, i)?, j);
            let base = norm_of(&pf, q)?;
            if base == 0.0 {
                return Ok(None);
            }
            let grad = lq_norm(&dsigma_magnitude(&pf, 1).magnitude, q)?.value();
            Ok(Some(grad / (2f64.powi(j) * base)))
        })?;
        skipped += rs.iter().filter(|x| x.is_none()).count();
        measured.extend(rs.into_iter().flatten());
    }
    let max = measured.iter().copied().fold(0.0, f64::max);
    let min = measured.iter().copied().fold(f64::INFINITY, f64::min);
    let spread_ok = measured.is_empty() || max / min <= 8.0 * PI;
    let mut r = CheckReport::new("gradient", gen.seed);
    r.samples = measured.len();
    r.max_ratio = max;
    r.hard = q == 2.0;
    if r.hard {
        let tol = 1e-12;
        r.threshold = 4.0 * PI;
        r.passed = spread_ok && (measured.is_empty() || (min >= PI * (1.0 - tol) && max <= 4.0 * PI * (1.0 + tol)));
    } else {
        r.threshold = 8.0 * PI;
        r.passed = spread_ok;
    }
    r.meta("min_ratio", if measured.is_empty() { 0.0 } else { min });
    r.meta("skipped", skipped as f64);
    r.meta("q", q);
    Ok(r)
}
