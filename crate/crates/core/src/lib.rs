//! Littlewood-Paley band analysis, inequality checks and a pseudo-spectral
//! Navier-Stokes solver on the unit torus.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inequality;
pub mod littlewood_paley;
pub mod norms;
pub mod ns;
pub mod random;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
