use std::path::PathBuf;

use crate::exponents::Exponent;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid exponent `{0}`")]
    InvalidExponent(String),

    #[error("invalid dimension {0} (must be in 1..={max})", max = crate::seqspace::MAX_DIM)]
    InvalidDimension(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("composition mismatch at junction {index}: stage {index} maps into {left}, stage {next} expects {right}", next = .index + 1)]
    JunctionMismatch {
        index: usize,
        left: String,
        right: String,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("pipeline requires p >= 2, got p = {0}; reduce by duality first")]
    UnreducedExponent(Exponent),

    #[error("rewrite `{scheme}` not applicable: {reason}")]
    RewriteInapplicable { scheme: &'static str, reason: String },

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
