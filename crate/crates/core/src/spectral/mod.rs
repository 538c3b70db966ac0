//! Lattice, Fourier transforms with the `e^{-2 pi i x.xi}` convention, and
//! spectral differentiation on the unit periodic box.

mod fft;
mod field;
mod grid;
mod product;

pub use fft::{fft3, Direction, Fft3};
pub use field::{
    derivative_by_counts, forward_transform, forward_transform_many, forward_transform_pair,
    inverse_transform, inverse_transform_complex, inverse_transform_many, inverse_transform_pair,
    inverse_transform_real, spectral_derivative, PhysicalField, SpectralField, REALNESS_TOLERANCE,
};
pub use grid::Grid;
pub use product::{apply_two_thirds, two_thirds_cutoff, ProductRule, ProductSpace};
