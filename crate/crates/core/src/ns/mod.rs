//! Pseudo-spectral incompressible Navier-Stokes on the unit torus.

pub mod checkpoint;
pub mod initial;
mod run;
mod solver;
mod state;
mod workspace;

pub use initial::{beltrami, beltrami_exact, random_divfree, taylor_green, InitialCondition};
pub use run::{run, run_from, EnergyMonitor, Monitor, MonitorTable, Observation, RunOptions, RunOutcome, StepRecord};
pub use solver::{leray_project, nonlinear_term, pressure_solve, step, Dealias, Scheme, StepConfig};
pub use state::VelocityState;
