//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced by state construction, propagation, measures, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was given a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A mode or pair index points outside the current register.
    #[error("index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    /// The same mode appears twice where a set is required.
    #[error("duplicate mode index {0}")]
    DuplicateIndex(usize),

    /// Matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary (max deviation {defect:.3e})")]
    NotUnitary { defect: f64 },

    /// A cumulative scattering update would shrink the register.
    #[error("invalid growth: step dimension {step} below cumulative dimension {cumulative}")]
    InvalidGrowth { step: usize, cumulative: usize },

    /// A symplectic eigenvalue fell below the physical floor of 1/2.
    #[error("unphysical covariance: symplectic eigenvalue {nu} below 1/2{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Unphysical { nu: f64, step: Option<usize> },

    /// Mode groups handed to an information measure overlap or are empty.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A closed-form evaluation was asked for outside its domain of validity.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Configuration could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading config or writing results.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a step index to an unphysical-state error raised mid-run.
    pub(crate) fn at_step(self, s: usize) -> Self {
        match self {
            Error::Unphysical { nu, .. } => Error::Unphysical { nu, step: Some(s) },
            other => other,
        }
    }
}
