use thiserror::Error;

/// Errors raised by the solvers and their supporting types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operator is not strongly monotone (beta = {beta:e})")]
    NotStronglyMonotone { beta: f64 },

    #[error("basis has no nonzero column")]
    EmptyBasis,

    #[error("projection onto cone/subspace intersection did not converge in {iterations} iterations (last move {last_move:e}); the intersection may be empty")]
    IntersectionProjectionFailed { iterations: usize, last_move: f64 },

    #[error("interior-point breakdown: {0}")]
    IpmBreakdown(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
