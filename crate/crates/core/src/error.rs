use thiserror::Error;

/// Errors produced by the solvers, criteria and finite-volume oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HcError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The asymmetric two-periodic pair does not exist at this activity.
    #[error(
        "no asymmetric two-periodic solution for lambda = {lambda} (requires lambda > {lambda_cr})"
    )]
    NoAsymmetricSolution { lambda: f64, lambda_cr: f64 },

    /// A root finder or fixed-point iteration did not reach the requested tolerance.
    #[error("convergence failure in {method}: residual {residual:e} > tolerance {tol:e} after {iterations} iterations")]
    Convergence {
        method: &'static str,
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    /// The function does not change sign on the bracketing interval.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Enumeration was requested on a ball that is too large.
    #[error("ball has {vertices} vertices; explicit enumeration is capped at {cap}")]
    SizeLimit { vertices: usize, cap: usize },

    /// Conditioning on an event of probability zero.
    #[error("conditioning event has probability zero: {0}")]
    ZeroProbability(String),

    /// Two sufficient conditions that must never fire together did so.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, HcError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HcError::Domain(msg.into()))
}
