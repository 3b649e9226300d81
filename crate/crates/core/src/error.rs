use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum CbfError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("Hermitian symmetry violated (max defect {defect:e}, allowed {allowed:e})")]
    SymmetryViolation { defect: f64, allowed: f64 },

    #[error("fields live on incompatible grids")]
    IncompatibleGrids,

    #[error("invalid exponent {0}")]
    InvalidExponent(f64),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("numerical blow-up at t = {last_valid_time}: {reason}")]
    BlowUp { last_valid_time: f64, reason: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CbfError>;
