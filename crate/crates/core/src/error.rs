use thiserror::Error;

use crate::fock::Statistics;

pub type Result<T, E = QSpaceError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QSpaceError {
    #[error("mode {mode} out of range for a space with {modes} modes")]
    InvalidMode { mode: usize, modes: usize },

    #[error("statistics mismatch: expected {expected}, found {found}")]
    StatisticsMismatch {
        expected: Statistics,
        found: Statistics,
    },

    #[error("mode count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("{kind} product requires {expected} vectors, found {found}")]
    ProductKindMismatch {
        kind: &'static str,
        expected: Statistics,
        found: Statistics,
    },

    #[error("fermionic occupation {count} on mode {mode} exceeds 1")]
    PauliViolation { mode: usize, count: u32 },

    #[error("{what} is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { what: &'static str, deviation: f64 },

    #[error("matrix dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("oracle size cap exceeded: {what} = {value} (max {max})")]
    SizeCap {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("tensor is not in the (anti)symmetric subspace (projection residual {residual:e})")]
    NotSymmetrized { residual: f64 },

    #[error("initial state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("norm drift {drift:e} exceeds tolerance at t = {time}")]
    NormDrift { drift: f64, time: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },

    #[error("invalid document: {0}")]
    InvalidDocument(String),
}
