use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("bond index {index} out of range 1..={max}")]
    BondIndex { index: usize, max: usize },

    #[error("dimension must be even, got {0}")]
    OddDimension(usize),

    #[error("zero vector has no participation ratio")]
    ZeroVector,

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(
        "eigenpair residuals exceed tol_eig={tol:.3e} (max {max:.3e}) for eigenvalue cluster {indices:?}"
    )]
    ResidualTolerance {
        tol: f64,
        max: f64,
        indices: Vec<usize>,
    },

    #[error("need at least {need} values, got {got}")]
    TooFew { need: usize, got: usize },

    #[error("grid is not uniform")]
    NonUniformGrid,

    #[error("invalid winding configuration: {0}")]
    InvalidWinding(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("invalid size list: {0}")]
    InvalidSizes(String),
}

pub type Result<T> = std::result::Result<T, Error>;
