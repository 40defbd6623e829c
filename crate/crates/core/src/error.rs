use thiserror::Error;

/// Errors raised by model construction and numerical evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model or configuration invariant does not hold.
    #[error("invalid model: {0}")]
    InvalidModel(String),
    /// An integral or sum that must be finite diverges.
    #[error("divergence: {0}")]
    Divergence(String),
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error bound {error:e}")]
    AccuracyFailure { estimate: f64, error: f64 },
    /// Series, continued fraction or iteration failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// Root bracketing failed.
    #[error("bracketing failure: {0}")]
    Bracketing(String),
    /// Hermitian factorization failed (matrix not positive definite).
    #[error("factorization failure: {0}")]
    Factorization(String),
    /// Least-squares problem too ill-conditioned.
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    /// Operation needs at least one sample.
    #[error("empty distribution")]
    EmptyDistribution,
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AccuracyFailure { .. }
                | Error::Convergence(_)
                | Error::Bracketing(_)
                | Error::Factorization(_)
                | Error::IllConditioned(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
