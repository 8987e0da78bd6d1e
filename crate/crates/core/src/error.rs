use thiserror::Error;

/// Crate-wide error type.
///
/// Numerical routines report failure through these variants instead of
/// panicking; panics are reserved for internal logic bugs.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument was outside the documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An integrand or profile produced a NaN during evaluation.
    #[error("NaN encountered: {0}")]
    NanEncountered(String),

    /// Adaptive quadrature hit its subdivision limit before reaching the
    /// requested tolerance. `estimate` is the best value found, `error_bound`
    /// the estimated error still outstanding.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    /// An improper integral's analytic tail bound could not be pushed below
    /// the tolerance budget at the maximum truncation radius.
    #[error("tail bound {bound} exceeds tolerance budget {budget} at truncation {truncation}")]
    TailBoundExceeded {
        bound: f64,
        budget: f64,
        truncation: f64,
    },

    /// Gaussian elimination found no acceptable pivot (matrix singular to
    /// working precision).
    #[error("linear system singular to working precision (pivot {pivot:e} at column {column})")]
    SingularSystem { pivot: f64, column: usize },

    /// An iterative scheme exhausted its iteration budget.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// Decay-rate fitting was asked to work on an unusable sample set.
    #[error("decay fit rejected: {0}")]
    DecayFitRejected(String),

    /// Report serialization failed.
    #[error("serialization failed: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
