use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale factor must be finite and positive, got {0}")]
    InvalidScale(f64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("division by the zero element")]
    DivisionByZero,
    #[error("power series diverged after {terms} terms (|partial sum| = {magnitude:e})")]
    SeriesDivergence { terms: usize, magnitude: f64 },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("step along axis {axis} leaves the clamped lattice at coordinate {coord}")]
    OutOfRange { axis: usize, coord: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gauge field is not integrable: worst loop deviation {deviation:e} exceeds {tolerance:e}")]
    NotIntegrable { deviation: f64, tolerance: f64 },
    #[error("invalid coupling: {0}")]
    InvalidCoupling(&'static str),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
