use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGrid(usize),

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("field has {got} values, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("spectral field is not Hermitian: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NonHermitian { residue: f64, tolerance: f64 },

    #[error("negative radius {0} passed to bump profile")]
    NegativeRadius(f64),

    #[error("band range {j_min}..={j_max} is invalid for grid n={n}: {reason}")]
    BandRange {
        j_min: i32,
        j_max: i32,
        n: usize,
        reason: &'static str,
    },

    #[error("norm exponent q={0} is below 1")]
    InvalidExponent(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("band {0} is empty for every sample")]
    EmptyBand(i32),

    #[error("product aliasing detected: {0:e} of the energy lies beyond the grid")]
    Aliasing(f64),

    #[error("non-finite state detected at t={time}")]
    BlowUp { time: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
