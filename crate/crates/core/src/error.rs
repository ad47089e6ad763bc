use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}", match .line { Some(l) => format!("validation error at line {l}: {message}"), None => format!("validation error: {message}") })]
    Validation { line: Option<usize>, message: String },

    #[error("{0}")]
    InsufficientData(String),

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("varimax did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation { line: None, message: message.into() }
    }

    pub(crate) fn at_line(line: usize, message: impl Into<String>) -> Self {
        Error::Validation { line: Some(line), message: message.into() }
    }

    /// Process exit code for the CLI: 2 for bad input, 3 for statistical
    /// degeneracy, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation { .. } | Error::InvalidArgument(_) => 2,
            Error::Json(_) | Error::Csv(_) => 2,
            Error::InsufficientData(_)
            | Error::ZeroVariance(_)
            | Error::Degenerate(_)
            | Error::NonConvergence { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}
