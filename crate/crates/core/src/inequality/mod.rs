//! Numerical checks of the Littlewood-Paley, product, Sobolev-type and
//! pressure inequalities. Every check returns a [`CheckReport`]; samples run
//! in parallel and are merged in index order, so reports are reproducible.

mod bounds;
mod generator;
mod identities;
mod initial;
mod kernel;
mod products;
mod report;
mod sobolev;

use rayon::prelude::*;

use crate::error::Result;

pub use bounds::{check_bernstein, check_cheap_lp, check_gradient_equivalence, check_projection_bound};
pub use generator::{FieldGenerator, FieldKind};
pub use identities::{check_partition, check_transform};
pub use initial::{check_initial_series_bound, INITIAL_K0};
pub use kernel::{continuum_band_kernel_l1, continuum_leq_kernel_l1, projection_constant};
pub use products::{
    alpha, check_beltrami_pressure, check_paraproduct_exactness, check_pressure_cz, check_product_inequality,
    paraproduct, pressure_ratio, product_estimate, velocity_tensor, Paraproduct, ProductExponents,
};
pub use report::{coefficient_of_variation, fit_slope, write_metadata_csv, write_reports_csv, CheckReport, REPORT_HEADER};
pub use sobolev::{
    band_log_ratio, check_sobolev_band, check_sobolev_sine, interpolation_log_ratio, log_weighted_square,
    power_form_log_ratio, rescale_modes,
};

/// Evaluates `f(offset + i)` for `i < count` in parallel, results in index order.
pub(crate) fn par_samples<T: Send>(count: usize, offset: u64, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..count as u64).into_par_iter().map(|i| f(offset + i)).collect()
}
