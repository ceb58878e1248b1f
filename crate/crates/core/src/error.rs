use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from its mirror by {deviation:e}")]
    NonHermitian { row: usize, col: usize, deviation: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },
    #[error("trace {trace} is not 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("empty input")]
    Empty,
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("expected {expected} states, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("Gram matrices differ by {deviation:e}")]
    GramMismatch { deviation: f64 },
    #[error("ensemble is linearly dependent (rank {rank} of {len})")]
    DependentEnsemble { rank: usize, len: usize },
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
