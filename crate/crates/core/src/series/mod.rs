//! Weighted frequency series of a velocity field, the bounds they are
//! compared against, and the barrier ODE.

mod barrier;
mod exponents;
mod monitor;
mod value;

pub use barrier::{
    barrier_ode, barrier_sweep, hypothesis_threshold, threshold_by_bisection, BarrierConfig, BarrierOutcome, Schedule,
    SweepPoint, Verdict,
};
pub use exponents::{bhat, bk, j0_cutoff, ExponentFamily};
pub use monitor::{SeriesMonitor, SERIES_HEADER};
pub use value::{
    gronwall_bound, high_band_decay, log_gronwall_bound, log_gronwall_target, log_sum_exp, series_value, DecayFit,
    JSplit, SeriesParams, SeriesTerms, SeriesValue, Weight, TRUNCATION_TOLERANCE,
};
