use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WignerError>;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("factors must be real-valued (velocity space) for this operation")]
    ComplexFactors,

    #[error("nonphysical state: total mass {0} is not positive")]
    NonPhysicalMass(f64),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed file: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl WignerError {
    /// Short machine-parsable category used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            WignerError::InvalidGrid(_) => "grid",
            WignerError::ShapeMismatch { .. } => "shape",
            WignerError::ComplexFactors => "complex-factors",
            WignerError::NonPhysicalMass(_) => "nonphysical",
            WignerError::UnknownProblem(_) => "problem",
            WignerError::Config(_) => "config",
            WignerError::Io { .. } => "io",
            WignerError::Format { .. } => "format",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WignerError::Io {
            path: path.into(),
            source,
        }
    }
}
