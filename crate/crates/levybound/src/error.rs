//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong while pricing or bounding.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A damping or strip condition fails (H1, H2 or payoff admissibility).
    #[error("{0}")]
    Strip(String),
    /// Adaptive quadrature ran out of budget; carries the best estimate.
    #[error("quadrature did not converge: value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    /// A monotonicity or convexity certificate could not be established.
    #[error("certificate failure: {0}")]
    Certificate(String),
    /// A search (bracketing, tolerance loop) did not reach its goal.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A non-finite number appeared where a finite one is required.
    #[error("overflow: {0}")]
    Overflow(String),
    /// The n-doubling loop hit its cap; carries the best report found.
    #[error("tolerance {tolerance:e} not met by n = {}: best bound {:e}", best.best_plan.n, best.best_bound.total)]
    ToleranceNotMet {
        tolerance: f64,
        best: Box<crate::optimizer::OptimizationReport>,
    },
    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(String),
    /// Invalid user configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
