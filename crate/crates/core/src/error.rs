use thiserror::Error;

/// Errors raised by the quadrature stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Cholesky factorisation failed even at the largest jitter.
    #[error("ill-conditioned gram matrix (n = {size}, condition estimate {condition_estimate:.3e})")]
    IllConditioned { size: usize, condition_estimate: f64 },

    /// A quantity that is nonnegative in exact arithmetic came out clearly negative.
    #[error("numerical inconsistency: {what} = {value:.6e}")]
    NumericalInconsistency { what: &'static str, value: f64 },

    /// Line-search direction has (numerically) zero length.
    #[error("degenerate line-search step: denominator {denominator:.3e}")]
    DegenerateStep { denominator: f64 },

    #[error("quadrature did not reach tolerance {tolerance:.1e} (estimated error {achieved:.3e})")]
    Convergence { tolerance: f64, achieved: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("ill-posed: {0}")]
    IllPosed(String),

    /// Propagated posteriors put almost no mass on positive values.
    #[error("degenerate posterior: rejection rate {rejection_rate:.4}")]
    DegeneratePosterior { rejection_rate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
