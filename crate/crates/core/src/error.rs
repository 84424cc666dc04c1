use num_complex::Complex64;
use std::path::PathBuf;

/// Errors raised across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration needs at least 2 zeros, got {0}")]
    TooFewZeros(usize),

    #[error("zero {index} is not finite: {value}")]
    NonFinite { index: usize, value: Complex64 },

    #[error("configuration is not centered: |sum of zeros| = {residual:e}")]
    NotCentered { residual: f64 },

    #[error("polynomial must be monic with a nonempty coefficient list")]
    NotMonic,

    #[error("operation needs degree >= {needed}, polynomial has degree {degree}")]
    DegreeTooLow { degree: usize, needed: usize },

    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    RootsDidNotConverge {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error("QR iteration did not converge after {iterations} iterations")]
    EigenDidNotConverge { iterations: usize },

    #[error("Jacobi SVD did not converge after {sweeps} sweeps")]
    SvdDidNotConverge { sweeps: usize },

    #[error("matrix entries must be finite")]
    NonFiniteMatrix,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("order n must be >= {min}, got {n}")]
    OrderTooSmall { n: usize, min: usize },

    #[error("exponent p must be >= 1 (or infinity), got {0}")]
    InvalidExponent(f64),

    #[error("index k = {k} out of range 0..={len}")]
    IndexOutOfRange { k: usize, len: usize },

    #[error("values must be nonnegative and finite")]
    NegativeValue,

    #[error("n must be even, got {0}")]
    OddOrder(usize),

    #[error("configuration has all zeros at the origin")]
    AllZero,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown distribution '{0}'")]
    UnknownDistribution(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
