use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension d = {0} (only d = 2 and d = 3 are implemented)")]
    UnsupportedDimension(u32),

    #[error("validation failed at r = {radius:e}: {reason}")]
    Validation { radius: f64, reason: String },

    #[error("classical phase-space integral diverges: {0}")]
    Divergent(String),

    #[error("inadmissible parameters: {0}")]
    Admissibility(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("channel cap of {cap} exceeded; use a larger h or a weaker potential")]
    ChannelCap { cap: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnsupportedDimension(_) | Error::Io { .. } => 2,
            Error::Domain(_)
            | Error::Admissibility(_)
            | Error::Constraint(_)
            | Error::Divergent(_) => 3,
            Error::Validation { .. }
            | Error::ChannelCap { .. }
            | Error::Numeric(_)
            | Error::Fit(_) => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
