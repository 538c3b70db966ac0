//! Truncated weighted series `sum_k sum_j ||D^sigma P_j u||_k^k / 2^{w_k}` in
//! log space, the Gronwall-type constant and the high-band decay fit.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use super::exponents::{bhat, bk, j0_cutoff};
use crate::error::{Error, Result};
use crate::littlewood_paley::{max_resolvable_band, project_band};
use crate::norms::{band_magnitude, dsigma_magnitude_components, lq_norm, lq_norms};
use crate::ns::VelocityState;
use crate::spectral::SpectralField;

/// Relative size of a boundary term above which the truncation is flagged.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesParams {
    pub sigma: u32,
    pub j0: i32,
    pub k0: u32,
    pub b: f64,
    /// Increasing exponents starting at `k0`.
    pub k_grid: Vec<u32>,
    /// Largest band summed; `None` means the grid limit.
    pub j_cap: Option<i32>,
}

impl SeriesParams {
    /// `sigma = 2`, `j0 = 1`, `k0 = 100`, `k` in `100, 110, ..., 200`.
    pub fn new(b: f64) -> Result<Self> {
        let p = Self {
            sigma: 2,
            j0: 1,
            k0: 100,
            b,
            k_grid: (100..=200).step_by(10).collect(),
            j_cap: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_k_grid(mut self, k_grid: Vec<u32>) -> Result<Self> {
        self.k_grid = k_grid;
        self.validate()?;
        Ok(self)
    }

    pub fn with_j_cap(mut self, j_cap: i32) -> Result<Self> {
        self.j_cap = Some(j_cap);
        self.validate()?;
        Ok(self)
    }

    pub fn with_sigma(mut self, sigma: u32) -> Result<Self> {
        self.sigma = sigma;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.b > 0.0) || !self.b.is_finite() {
            return bad("B", format!("need a finite B > 0, got {}", self.b));
        }
        if self.j0 < 1 {
            return bad("j0", format!("need j0 >= 1, got {}", self.j0));
        }
        if self.k0 < 1 {
            return bad("k0", "need k0 >= 1".into());
        }
        if self.k_grid.first() != Some(&self.k0) {
            return bad("k_grid", format!("must start at k0={}", self.k0));
        }
        if self.k_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("k_grid", "must be strictly increasing".into());
        }
        if matches!(self.j_cap, Some(c) if c < self.j0) {
            return bad("j_cap", format!("j_cap below j0={}", self.j0));
        }
        Ok(())
    }

    pub fn j0_cutoff(&self) -> i32 {
        j0_cutoff(self.b, self.sigma)
    }

    fn j_top(&self, u: &VelocityState) -> Result<i32> {
        let limit = max_resolvable_band(u.grid());
        match self.j_cap {
            Some(c) if c > limit => Err(Error::BandRange {
                j_min: self.j0,
                j_max: c,
                n: u.grid().n(),
                reason: "j_cap beyond the last resolvable band",
            }),
            Some(c) => Ok(c),
            None => Ok(limit.max(self.j0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Bk,
    BhatK,
}

impl Weight {
    pub fn exponent(self, k: f64, b: f64) -> f64 {
        match self {
            Weight::Bk => bk(k, b),
            Weight::BhatK => bhat(k, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JSplit {
    All,
    /// `j0 <= j <= J0`
    Low,
    /// `j > J0`
    High,
}

/// One evaluated series with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Natural log of the sum; `-inf` for an empty or zero series.
    pub log_value: f64,
    /// Terms at the largest `k`, relative to the total.
    pub last_k_fraction: f64,
    /// Terms at the grid's last band, relative to the total; 0 when the
    /// selected range stops below it.
    pub last_j_fraction: f64,
}

impl SeriesValue {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn truncation_warning(&self) -> bool {
        self.last_k_fraction > TRUNCATION_TOLERANCE || self.last_j_fraction > TRUNCATION_TOLERANCE
    }
}

/// `ln sum exp(x)` with max rescaling, summed in the given order.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln ||D^sigma P_j u||_k` for every band and exponent of one state, plus
/// the sup norm of each band.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerms {
    pub params: SeriesParams,
    /// Bands `j0..=j_top`.
    pub bands: Vec<i32>,
    /// `log_norms[j - j0][c]` for `k = k_grid[c]`.
    pub log_norms: Vec<Vec<f64>>,
    pub log_sup: Vec<f64>,
    /// Last resolvable band of the grid.
    pub grid_top: i32,
}

impl SeriesTerms {
    pub fn compute(u: &VelocityState, params: &SeriesParams) -> Result<Self> {
        params.validate()?;
        let top = params.j_top(u)?;
        let bands: Vec<i32> = (params.j0..=top).collect();
        let mut qs: Vec<f64> = params.k_grid.iter().map(|&k| f64::from(k)).collect();
        qs.push(f64::INFINITY);
        let rows = bands
            .par_iter()
            .map(|&j| {
                let norms = lq_norms(&band_magnitude(u, j, params.sigma), &qs)?;
                Ok(norms.iter().map(|n| n.log_value).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let (log_norms, log_sup) = rows
            .into_iter()
            .map(|mut r| {
                let sup = r.pop().expect("sup column");
                (r, sup)
            })
            .unzip();
        Ok(Self {
            params: params.clone(),
            bands,
            log_norms,
            log_sup,
            grid_top: max_resolvable_band(u.grid()),
        })
    }

    fn band_range(&self, split: JSplit) -> (i32, i32) {
        let last = *self.bands.last().expect("at least one band");
        let cut = self.params.j0_cutoff();
        match split {
            JSplit::All => (self.params.j0, last),
            JSplit::Low => (self.params.j0, cut.min(last)),
            JSplit::High => ((cut + 1).max(self.params.j0), last),
        }
    }

    fn log_term(&self, row: usize, col: usize, weight: Weight) -> f64 {
        let k = f64::from(self.params.k_grid[col]);
        let ln = self.log_norms[row][col];
        if ln == f64::NEG_INFINITY {
            return ln;
        }
        k * ln - weight.exponent(k, self.params.b) * LN_2
    }

    pub fn value(&self, weight: Weight, split: JSplit) -> SeriesValue {
        let (lo, hi) = self.band_range(split);
        let rows: Vec<usize> = (lo..=hi).map(|j| (j - self.params.j0) as usize).collect();
        let cols = self.params.k_grid.len();
        let all: Vec<f64> = rows
            .iter()
            .flat_map(|&r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| self.log_term(r, c, weight))
            .collect();
        let total = log_sum_exp(&all);
        let fraction = |xs: Vec<f64>| {
            if total == f64::NEG_INFINITY {
                0.0
            } else {
                (log_sum_exp(&xs) - total).exp()
            }
        };
        let last_k = fraction(rows.iter().map(|&r| self.log_term(r, cols - 1, weight)).collect());
        let last_j = if hi == self.grid_top && !rows.is_empty() {
            let r = rows[rows.len() - 1];
            fraction((0..cols).map(|c| self.log_term(r, c, weight)).collect())
        } else {
            0.0
        };
        SeriesValue {
            log_value: total,
            last_k_fraction: last_k,
            last_j_fraction: last_j,
        }
    }

    /// `max_j ||D^sigma P_j u||_inf / 2^{B+1}`.
    pub fn sup_ratio(&self) -> f64 {
        let max = self.log_sup.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (max - (self.params.b + 1.0) * LN_2).exp()
    }
}

pub fn series_value(u: &VelocityState, params: &SeriesParams, weight: Weight, split: JSplit) -> Result<SeriesValue> {
    Ok(SeriesTerms::compute(u, params)?.value(weight, split))
}

/// `ln C` with `C = exp(c (1 + nu^-2) ((1 + |u0|^5) T + nu^-1 |u0|^{8/3}))`,
/// `|u0| = ||u0||_2`.
pub fn log_gronwall_bound(u0_l2: f64, nu: f64, t: f64, calibration_c: f64) -> Result<f64> {
    let bad = |name, v: f64| Err(Error::InvalidParameter { name, reason: format!("{v}") });
    if !(u0_l2 >= 0.0) || !u0_l2.is_finite() {
        return bad("u0_l2", u0_l2);
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return bad("nu", nu);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return bad("T", t);
    }
    if !(calibration_c > 0.0) || !calibration_c.is_finite() {
        return bad("calibration_c", calibration_c);
    }
    let a = u0_l2;
    Ok(calibration_c * (1.0 + nu.powi(-2)) * ((1.0 + a.powi(5)) * t + a.powf(8.0 / 3.0) / nu))
}

/// The constant `C` itself; `inf` when it exceeds the double range.
pub fn gronwall_bound(u0_l2: f64, nu: f64, t: f64, calibration_c: f64) -> Result<f64> {
    Ok(log_gronwall_bound(u0_l2, nu, t, calibration_c)?.exp())
}

/// `ln(2C - 1)` from `ln C`, without overflow.
pub fn log_gronwall_target(log_c: f64) -> f64 {
    log_c + (2.0 - (-log_c).exp()).ln()
}

/// Fit of `log2(||D^sigma P_j u||_k / ||D^{sigma+1} P_j u||_{k0})` against
/// `j`, whose proven shape is `2^{(3/k0 - 3/k - 1) j}` up to a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub bands: Vec<i32>,
    pub log2_ratios: Vec<f64>,
    /// `None` with fewer than two nonzero bands.
    pub slope: Option<f64>,
    pub shape_exponent: f64,
}

pub fn high_band_decay(u: &VelocityState, params: &SeriesParams, k: f64, j_range: (i32, i32)) -> Result<DecayFit> {
    params.validate()?;
    let k0 = f64::from(params.k0);
    let (lo, hi) = j_range;
    let limit = max_resolvable_band(u.grid());
    if lo < params.j0 || hi < lo || hi > limit {
        return Err(Error::BandRange {
            j_min: lo,
            j_max: hi,
            n: u.grid().n(),
            reason: "decay fit bands must lie in j0..=log2(n/2)+1",
        });
    }
    let rows = (lo..=hi)
        .into_par_iter()
        .map(|j| {
            let banded: Vec<SpectralField> = u.components().iter().map(|c| project_band(c, j)).collect();
            let refs: Vec<&SpectralField> = banded.iter().collect();
            let num = lq_norm(&dsigma_magnitude_components(&refs, params.sigma).magnitude, k)?;
            let den = lq_norm(&dsigma_magnitude_components(&refs, params.sigma + 1).magnitude, k0)?;
            Ok((!num.is_zero() && !den.is_zero()).then(|| (j, (num.log_value - den.log_value) / LN_2)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (bands, log2_ratios): (Vec<i32>, Vec<f64>) = rows.into_iter().flatten().unzip();
    let slope = (bands.len() >= 2).then(|| {
        let xs: Vec<f64> = bands.iter().map(|&j| f64::from(j)).collect();
        crate::inequality::fit_slope(&xs, &log2_ratios)
    });
    Ok(DecayFit {
        bands,
        log2_ratios,
        slope,
        shape_exponent: 3.0 / k0 - 3.0 / k - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns::{random_divfree, VelocityState};
    use crate::spectral::Grid;

    #[test]
    fn params_validation() {
        assert!(SeriesParams::new(2.0).is_ok());
        assert!(SeriesParams::new(0.0).is_err());
        let p = SeriesParams::new(2.0).unwrap();
        assert!(p.clone().with_k_grid(vec![110, 120]).is_err());
        assert!(p.clone().with_k_grid(vec![100, 100]).is_err());
        assert!(p.clone().with_j_cap(0).is_err());
        assert_eq!(p.j0_cutoff(), 8);
    }

    #[test]
    fn zero_state_gives_empty_series() {
        let u = VelocityState::zero(Grid::new(8).unwrap(), 0.1).unwrap();
        let p = SeriesParams::new(1.0).unwrap();
        let v = series_value(&u, &p, Weight::Bk, JSplit::All).unwrap();
        assert_eq!(v.log_value, f64::NEG_INFINITY);
        assert_eq!(v.value(), 0.0);
        assert!(!v.truncation_warning());
    }

    #[test]
    fn splits_partition_the_total() {
        let u = random_divfree(Grid::new(16).unwrap(), 3, 1.0, 1.0, 0.1).unwrap();
        // J0 = 2 at sigma = 2 splits bands 1..=4
        let p = SeriesParams::new(0.5).unwrap().with_k_grid(vec![100, 101]).unwrap();
        let t = SeriesTerms::compute(&u, &p).unwrap();
        let all = t.value(Weight::Bk, JSplit::All).value();
        let parts = t.value(Weight::Bk, JSplit::Low).value() + t.value(Weight::Bk, JSplit::High).value();
        assert!(all > 0.0);
        assert!((all - parts).abs() <= 1e-12 * all);
    }

    #[test]
    fn gronwall_reference_values() {
        assert!((gronwall_bound(0.0, 1.0, 1.0, 1.0).unwrap() - std::f64::consts::E.powi(2)).abs() < 1e-12);
        let at_zero = log_gronwall_bound(2.0, 0.5, 0.0, 1.0).unwrap();
        assert!((at_zero - 5.0 * 2.0 * 2f64.powf(8.0 / 3.0)).abs() < 1e-12);
        let base = log_gronwall_bound(1.0, 0.5, 1.0, 1.0).unwrap();
        assert!(log_gronwall_bound(1.0, 0.5, 2.0, 1.0).unwrap() >= base);
        assert!(log_gronwall_bound(1.5, 0.5, 1.0, 1.0).unwrap() >= base);
        assert!(log_gronwall_bound(1.0, 0.25, 1.0, 1.0).unwrap() >= base);
        assert!(log_gronwall_bound(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gronwall_target_matches_direct_form() {
        for c in [0.0, 0.5, 3.0] {
            assert!((log_gronwall_target(c) - (2.0 * c.exp() - 1.0).ln()).abs() < 1e-14);
        }
        assert!((log_gronwall_target(2000.0) - (2000.0 + LN_2)).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_huge_terms() {
        let v = log_sum_exp(&[1000.0, 1000.0, f64::NEG_INFINITY]);
        assert!((v - (1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
