use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or unsupported configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The equilibrium system of one trial is singular or too close to singular
    /// to trust. Campaigns count these and exclude them from proportions.
    #[error("degenerate trial: {reason}")]
    Degenerate { reason: String, guard_sigma: Option<f64> },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NonConvergence { iterations: usize, last_estimate: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("trajectory diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("integrator produced a negative abundance {value} at t = {time}")]
    NegativeAbundance { time: f64, value: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate { .. })
    }
}
