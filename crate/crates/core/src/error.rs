//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid must have at least 2 samples, got {0}")]
    GridTooSmall(usize),

    #[error("evaluator produced non-finite value {value} at x = {x}")]
    NonFiniteSample { x: f64, value: f64 },

    #[error("grid sizes do not match: {left} vs {right}")]
    GridSizeMismatch { left: usize, right: usize },

    #[error("basis is empty")]
    EmptyBasis,

    #[error("indicator parameters out of range: a = {a}, sigma = {sigma} (both must lie in [0,1])")]
    IndicatorOutOfRange { a: f64, sigma: f64 },

    #[error("target norm is zero; normalization undefined")]
    ZeroTargetNorm,

    #[error("squared error must be nonnegative, got {0}")]
    NegativeErrorSquared(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{name} = {value} is outside its domain ({lo}, {hi})")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("product factor 1 - {k}*exp(-n*eps^2/2) is nonpositive at k = {k}; the estimate's domain requires N*exp(-n*eps^2/2) < 1")]
    NonPositiveFactor { k: usize },

    #[error("boundary case sin^2(eps) = 1 - lambda: asymptotic regime undefined")]
    ArtsteinBoundary,

    #[error("matrix has no columns")]
    EmptyMatrix,

    #[error("column {index} has length {len}, expected {expected}")]
    ColumnLengthMismatch {
        index: usize,
        len: usize,
        expected: usize,
    },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("vector lengths do not match: {left} vs {right}")]
    VectorLengthMismatch { left: usize, right: usize },

    #[error("stirling remainder {remainder:e} exceeds its guaranteed bound {bound:e} at x = {x}")]
    StirlingRemainderExceeded { x: f64, remainder: f64, bound: f64 },

    #[error("inequality chain collapsed numerically at x = {0}; x is too close to the domain boundary")]
    InequalityCollapse(f64),
}
