//! Lattice `L^q` norms in log space, `|D^sigma f|` magnitude fields and the
//! band terms `||D^sigma P_j u||_k` that feed the frequency series.

use crate::error::{Error, Result};
use crate::littlewood_paley::project_band;
use crate::ns::VelocityState;
use crate::spectral::{derivative_by_counts, inverse_transform_many, Grid, PhysicalField, SpectralField};

/// Natural log of a nonnegative norm; `-inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNorm {
    pub log_value: f64,
    /// Exponent of the norm, `f64::INFINITY` for the sup norm.
    pub q: f64,
}

impl LogNorm {
    pub fn zero(q: f64) -> Self {
        Self {
            log_value: f64::NEG_INFINITY,
            q,
        }
    }

    /// Direct value; overflows to `inf` when the norm is not representable.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }

    /// `ln(||f||^p)`.
    pub fn log_pow(&self, p: f64) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            p * self.log_value
        }
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidExponent(q));
    }
    Ok(())
}

/// `(cell_volume * sum |f|^q)^(1/q)` in log space with max rescaling.
pub fn lq_norm(f: &PhysicalField, q: f64) -> Result<LogNorm> {
    check_exponent(q)?;
    Ok(lq_norm_slice(f.values(), f.grid().cell_volume(), q))
}

pub(crate) fn lq_norm_slice(values: &[f64], cell_volume: f64, q: f64) -> LogNorm {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return LogNorm::zero(q);
    }
    if q.is_infinite() {
        return LogNorm { log_value: max.ln(), q };
    }
    let inv = 1.0 / max;
    let s: f64 = if q == q.trunc() && q <= 64.0 {
        let p = q as i32;
        values.iter().map(|v| (v.abs() * inv).powi(p)).sum()
    } else {
        values.iter().map(|v| (v.abs() * inv).powf(q)).sum()
    };
    LogNorm {
        log_value: max.ln() + (cell_volume.ln() + s.ln()) / q,
        q,
    }
}

/// Several norms of the same samples, sharing one pass of logarithms.
pub fn lq_norms(f: &PhysicalField, qs: &[f64]) -> Result<Vec<LogNorm>> {
    for &q in qs {
        check_exponent(q)?;
    }
    let values = f.values();
    let cv = f.grid().cell_volume();
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(qs.iter().map(|&q| LogNorm::zero(q)).collect());
    }
    let logs: Vec<f64> = values
        .iter()
        .filter(|v| **v != 0.0)
        .map(|v| (v.abs() / max).ln())
        .collect();
    Ok(qs
        .iter()
        .map(|&q| {
            if q.is_infinite() {
                return LogNorm { log_value: max.ln(), q };
            }
            let s: f64 = logs.iter().map(|l| (q * l).exp()).sum();
            LogNorm {
                log_value: max.ln() + (cv.ln() + s.ln()) / q,
                q,
            }
        })
        .collect())
}

/// Riemann-sum integral `cell_volume * sum |f|^p`, with `0^0 = 1`.
pub fn power_integral(f: &PhysicalField, p: f64) -> f64 {
    let cv = f.grid().cell_volume();
    if p == 0.0 {
        return cv * f.values().len() as f64;
    }
    cv * f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>()
}

/// `cell_volume * sum |a|^p |b|^2`, with `0^0 = 1`.
pub fn weighted_square_integral(a: &PhysicalField, p: f64, b: &PhysicalField) -> f64 {
    let cv = a.grid().cell_volume();
    cv * a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| {
            let w = if p == 0.0 { 1.0 } else { x.abs().powf(p) };
            w * y * y
        })
        .sum::<f64>()
}

/// Log of the interpolation majorant `||f||_a^theta ||f||_b^(1-theta)`.
pub fn interpolate_log(a: LogNorm, b: LogNorm, theta: f64) -> f64 {
    a.log_pow(theta) + b.log_pow(1.0 - theta)
}

/// Pointwise `|D^sigma f|`, the Euclidean norm over all ordered
/// `sigma`-tuples of partial derivatives.
#[derive(Debug, Clone)]
pub struct DsigmaField {
    pub sigma: u32,
    pub magnitude: PhysicalField,
}

/// Distinct derivative multi-indices of order `sigma` with the number of
/// ordered tuples collapsing onto each.
pub fn derivative_multi_indices(sigma: u32) -> Vec<([u32; 3], f64)> {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let mut out = Vec::new();
    for a in 0..=sigma {
        for b in 0..=(sigma - a) {
            let c = sigma - a - b;
            out.push(([a, b, c], fact(sigma) / (fact(a) * fact(b) * fact(c))));
        }
    }
    out
}

/// `|D^sigma u|` for a scalar or vector field, components combined in the
/// Euclidean sense.
pub fn dsigma_magnitude_components(components: &[&SpectralField], sigma: u32) -> DsigmaField {
    assert!(!components.is_empty());
    let grid = components[0].grid();
    let indices = derivative_multi_indices(sigma);
    let mut derivs = Vec::with_capacity(indices.len() * components.len());
    let mut weights = Vec::with_capacity(derivs.capacity());
    for comp in components {
        for (counts, w) in &indices {
            derivs.push(derivative_by_counts(comp, *counts));
            weights.push(*w);
        }
    }
    let refs: Vec<&SpectralField> = derivs.iter().collect();
    let physical = inverse_transform_many(&refs);
    let mut acc = vec![0.0; grid.len()];
    for (field, w) in physical.iter().zip(&weights) {
        for (a, v) in acc.iter_mut().zip(field.values()) {
            *a += w * v * v;
        }
    }
    for a in &mut acc {
        *a = a.sqrt();
    }
    DsigmaField {
        sigma,
        magnitude: PhysicalField::from_values_unchecked(grid, acc),
    }
}

pub fn dsigma_magnitude(f: &SpectralField, sigma: u32) -> DsigmaField {
    dsigma_magnitude_components(&[f], sigma)
}

/// `|D^sigma P_j u|` over the three velocity components.
pub fn band_magnitude(u: &VelocityState, j: i32, sigma: u32) -> PhysicalField {
    let banded: Vec<SpectralField> = u
        .components()
        .iter()
        .map(|c| project_band(c, j))
        .collect();
    let refs: Vec<&SpectralField> = banded.iter().collect();
    dsigma_magnitude_components(&refs, sigma).magnitude
}

/// `||D^sigma P_j u||_k`. Raise to the power `k` with [`LogNorm::log_pow`].
pub fn band_norm_term(u: &VelocityState, j: i32, k: f64, sigma: u32) -> Result<LogNorm> {
    check_exponent(k)?;
    let limit = crate::littlewood_paley::max_resolvable_band(u.grid());
    if j > limit {
        return Err(Error::BandRange {
            j_min: j,
            j_max: j,
            n: u.grid().n(),
            reason: "band starts beyond the grid Nyquist",
        });
    }
    lq_norm(&band_magnitude(u, j, sigma), k)
}

/// Unweighted squared L2 norm of the gradient of one scalar field,
/// `sum (2 pi |xi|)^2 |c|^2`.
pub fn gradient_energy(f: &SpectralField) -> f64 {
    let grid: Grid = f.grid();
    let n = grid.n();
    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    // odd derivatives drop the unpaired -n/2 plane
    let k2: Vec<f64> = grid
        .axis_wavenumbers()
        .iter()
        .map(|&w| if w == -grid.nyquist() { 0.0 } else { (w * w) as f64 })
        .collect();
    let c = f.coeffs();
    let mut total = 0.0;
    for i0 in 0..n {
        for i1 in 0..n {
            let base = (i0 * n + i1) * n;
            let k01 = k2[i0] + k2[i1];
            for i2 in 0..n {
                total += (k01 + k2[i2]) * c[base + i2].norm_sqr();
            }
        }
    }
    four_pi2 * total
}
