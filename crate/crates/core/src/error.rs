use thiserror::Error;

/// Errors produced by the analytic routines and the dense oracle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem size: {0}")]
    InvalidSize(String),

    #[error("{name} = {value} outside the valid range {lo}..={hi}")]
    OutOfRange {
        name: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("overlap q = {0} outside [0, 1]")]
    InvalidOverlap(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("operator dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("malformed operator dump: {0}")]
    Dump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: i64, lo: i64, hi: i64) -> Result<()> {
    if value < lo || value > hi {
        Err(Error::OutOfRange { name, value, lo, hi })
    } else {
        Ok(())
    }
}
