use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Adaptive refinement stopped before the error estimate met the tolerance.
    #[error("no convergence: value {value:e}, error estimate {estimate:e} after {n_evals} evaluations")]
    NonConvergence { value: f64, estimate: f64, n_evals: usize },

    /// Field and plan sizes disagree, or a grid is malformed.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// A least-squares design is too poorly conditioned to trust.
    #[error("ill-conditioned regression (condition number {0:e})")]
    IllConditioned(f64),

    /// Malformed field file.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { func, detail: detail.into() }
}
