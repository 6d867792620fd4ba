use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("universal-variable Kepler iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("degenerate orbit: |r x v| = {0:e} is below the rectilinear threshold")]
    DegenerateOrbit(f64),

    #[error("episode already finished; call reset() first")]
    EpisodeFinished,

    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: String,
        expected: String,
        got: String,
    },

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("rollout buffer was already consumed by a previous update")]
    StaleBuffer,

    #[error("campaign contains no episodes")]
    EmptyCampaign,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
