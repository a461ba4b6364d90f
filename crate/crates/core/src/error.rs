use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("weight matrix must be nonzero")]
    ZeroWeight,

    #[error("matrix is singular in {0}")]
    Singular(&'static str),

    #[error("metric matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NonHermitianMetric(f64),

    #[error("metric matrix is singular (rank {rank} < {dim})")]
    SingularMetric { rank: usize, dim: usize },

    #[error("{what} does not exist: {reason}")]
    NonExistent { what: &'static str, reason: String },

    #[error("precondition of {op} violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("{what} failed verification: {detail}")]
    Verification { what: &'static str, detail: String },

    #[error("{0} is only available on the floating-point backend")]
    FloatOnly(&'static str),

    #[error("missing input for {label}: {what}")]
    MissingInput { label: String, what: &'static str },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value in matrix input")]
    NonFinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn verification(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Verification {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn nonexistent(what: &'static str, reason: impl Into<String>) -> Self {
        Error::NonExistent {
            what,
            reason: reason.into(),
        }
    }

    /// True when the error reports that a requested inverse does not exist,
    /// as opposed to malformed input.
    pub fn is_nonexistence(&self) -> bool {
        matches!(self, Error::NonExistent { .. })
    }
}
