//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model constraint does not hold (sign condition, boundary constant,
    /// negative initial data, ...). Carries the violated constraint.
    #[error("admissibility violation: {0}")]
    Admissibility(String),

    /// Evaluation outside the covered size range.
    #[error("evaluation outside the covered range at s = {s}")]
    Domain { s: f64 },

    /// Malformed piecewise-linear table or grid kernel data.
    #[error("invalid table data: {0}")]
    InvalidTable(String),

    /// A scalar or structural argument is out of range (grid size, time step,
    /// window bounds, sample counts, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state vector does not match the grid.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A linear system factorization failed.
    #[error("singular linear system (condition estimate {cond_estimate:.3e}{})",
            .dt.map(|d| format!(", dt = {d}")).unwrap_or_default())]
    SingularSystem { cond_estimate: f64, dt: Option<f64> },

    /// A state stopped being finite during time stepping.
    #[error("non-finite state entries after step {step}")]
    NonFinite { step: usize },

    /// Power iteration did not reach the residual tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Power iteration collapsed (zero-mass iterate).
    #[error("degenerate iteration: iterate collapsed to zero mass")]
    DegenerateIteration,

    /// Config text did not parse or is semantically inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        // toml errors carry line/column context in their Display output.
        Error::Config(e.to_string())
    }
}
