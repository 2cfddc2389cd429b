use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition or argument check failed.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An iterative solver ran out of iterations.
    #[error("{what} did not converge within {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: u64,
        residual: f64,
    },

    /// A numerical failure other than non-convergence (degenerate mesh,
    /// loss of positivity, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A file did not match a known schema version.
    #[error("unsupported or corrupt file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line driver:
    /// 1 for validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Format(_) | Error::Io(_) => 1,
            Error::NoConvergence { .. } | Error::Numerical(_) => 2,
        }
    }
}
