//! Smooth radial bumps and the dyadic band projections built from them.
//!
//! The low-pass profile is `phi(r) = h(2 - r) / (h(2 - r) + h(r - 1))` with
//! `h(t) = exp(-1/t)` for `t > 0` and `0` otherwise. It is exactly 1 on
//! `[0, 1]`, exactly 0 on `[2, inf)` and smooth across both splice points.
//! The band profile is `psi(r) = phi(r) - phi(2r)`, supported in `[1/2, 2]`,
//! and band `j` applies `psi(2^-j |xi|)` to every coefficient.

use crate::error::{Error, Result};
use crate::spectral::{inverse_transform_real, Grid, SpectralField};

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn phi_unchecked(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = h(2.0 - r);
    let b = h(r - 1.0);
    a / (a + b)
}

/// Low-pass profile; `r` must be nonnegative.
pub fn phi_eval(r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    Ok(phi_unchecked(r))
}

/// Band profile `phi(r) - phi(2r)`. Negative radii evaluate to 0.
pub fn psi_eval(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    phi_unchecked(r) - phi_unchecked(2.0 * r)
}

#[inline]
fn dyadic(j: i32) -> f64 {
    2f64.powi(j)
}

fn xi_radius(xi: [i64; 3]) -> f64 {
    ((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64).sqrt()
}

/// Multiplier of the band-`j` projection at a lattice wavevector.
pub fn band_multiplier(j: i32, xi: [i64; 3]) -> f64 {
    psi_eval(xi_radius(xi) / dyadic(j))
}

/// Multiplier of `P_{<=j}`, which keeps the mean.
pub fn leq_multiplier(j: i32, xi: [i64; 3]) -> f64 {
    phi_unchecked(xi_radius(xi) / dyadic(j))
}

/// `P_j f`: coefficients scaled by `psi(2^-j |xi|)`.
pub fn project_band(f: &SpectralField, j: i32) -> SpectralField {
    let scale = dyadic(j);
    f.multiply_radial(|r2| psi_eval((r2 as f64).sqrt() / scale))
}

/// `P_{<=j} f`: coefficients scaled by `phi(2^-j |xi|)`.
pub fn project_leq(f: &SpectralField, j: i32) -> SpectralField {
    let scale = dyadic(j);
    f.multiply_radial(|r2| phi_unchecked((r2 as f64).sqrt() / scale))
}

/// `sum_{m=lo}^{hi} P_m f` as one multiplier pass.
pub fn project_band_range(f: &SpectralField, lo: i32, hi: i32) -> SpectralField {
    if lo > hi {
        return SpectralField::zeros(f.grid());
    }
    f.multiply_radial(|r2| {
        let r = (r2 as f64).sqrt();
        (lo..=hi).map(|m| psi_eval(r / dyadic(m))).sum()
    })
}

/// Top band whose annulus sits inside the per-axis Nyquist range.
pub fn default_j_max(grid: Grid) -> i32 {
    (grid.n() / 2).ilog2() as i32 - 1
}

/// Largest band whose inner radius `2^{j-1}` is still resolvable. Together
/// with lower bands it covers every lattice wavevector of the grid.
pub fn max_resolvable_band(grid: Grid) -> i32 {
    (grid.n() / 2).ilog2() as i32 + 1
}

/// `P_{<= j_min - 1} f` together with the bands `P_j f` for `j_min..=j_max`.
#[derive(Debug, Clone)]
pub struct BandDecomposition {
    pub j_min: i32,
    pub j_max: i32,
    pub bands: Vec<SpectralField>,
    pub low_pass: SpectralField,
}

impl BandDecomposition {
    pub fn band(&self, j: i32) -> Option<&SpectralField> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        self.bands.get((j - self.j_min) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &SpectralField)> {
        (self.j_min..=self.j_max).zip(self.bands.iter())
    }

    /// `low_pass + sum_j bands`; equals the input wherever `|xi| <= 2^{j_max}`.
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = self.low_pass.clone();
        for b in &self.bands {
            out += b;
        }
        out
    }
}

pub fn decompose(f: &SpectralField, j_min: i32, j_max: i32) -> Result<BandDecomposition> {
    let grid = f.grid();
    if j_min > j_max {
        return Err(Error::BandRange {
            j_min,
            j_max,
            n: grid.n(),
            reason: "j_min exceeds j_max",
        });
    }
    if j_max > max_resolvable_band(grid) {
        return Err(Error::BandRange {
            j_min,
            j_max,
            n: grid.n(),
            reason: "top band starts beyond the grid Nyquist",
        });
    }
    let bands = (j_min..=j_max).map(|j| project_band(f, j)).collect();
    Ok(BandDecomposition {
        j_min,
        j_max,
        bands,
        low_pass: project_leq(f, j_min - 1),
    })
}

/// `cell_volume * sum_x |K_j(x)|` for the lattice kernel of `P_j`.
///
/// Discrete Young's inequality makes this the exact operator bound of `P_j`
/// on every lattice `L^q` norm.
pub fn band_kernel_l1(grid: Grid, j: i32) -> f64 {
    let mut delta = SpectralField::zeros(grid);
    for c in delta.coeffs_mut() {
        c.re = 1.0;
    }
    let kernel = inverse_transform_real(&project_band(&delta, j));
    grid.cell_volume() * kernel.values().iter().map(|v| v.abs()).sum::<f64>()
}

/// Same as [`band_kernel_l1`] for `P_{<=j}`.
pub fn leq_kernel_l1(grid: Grid, j: i32) -> f64 {
    let mut delta = SpectralField::zeros(grid);
    for c in delta.coeffs_mut() {
        c.re = 1.0;
    }
    let kernel = inverse_transform_real(&project_leq(&delta, j));
    grid.cell_volume() * kernel.values().iter().map(|v| v.abs()).sum::<f64>()
}
