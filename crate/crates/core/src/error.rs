use std::path::PathBuf;

/// Errors produced by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The eigensolver hit its sweep cap.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e}, dim {dim})")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        dim: usize,
    },

    /// A root or minimum search could not be carried out on the bracket.
    #[error("search failed on [{lo}, {hi}]: {reason}")]
    Search { lo: f64, hi: f64, reason: String },

    /// Two independent evaluations of the same quantity disagree.
    #[error("inconsistent results: {0}")]
    Inconsistent(String),

    /// A configuration value could not be parsed or validated.
    #[error("invalid value for `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Whether the error stems from user input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Domain(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
