//! Error type shared by every module in the crate.

use std::fmt;

/// Failure modes of parameter validation, series evaluation, quadrature,
/// kernel evaluation, and hypothesis checking.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two parameter vectors whose lengths must agree did not.
    DimensionMismatch { left: usize, right: usize },
    /// A parameter that must be strictly positive was not.
    NonPositiveParameter { value: f64 },
    /// A parameter or argument was NaN or infinite.
    NonFiniteParameter { value: f64 },
    /// A denominator parameter sits at a gamma pole (non-positive integer).
    PoleError { value: f64 },
    /// The (p, q) shape is outside what the operation supports.
    ShapeError { p: usize, q: usize },
    /// The argument lies outside the operation's validity domain.
    DomainError(String),
    /// Series accumulation failed to converge within the term budget,
    /// or cancellation exhausted the available precision.
    NonConvergence { terms: usize },
    /// Quadrature level doubling stalled before reaching the tolerance.
    NoConvergence { levels: usize },
    /// Parameters are too degenerate for the requested method.
    DegenerateParameters(String),
    /// The contour integral for this kernel does not decay fast enough
    /// (the integrand falls off like |s|^-psi, so psi > 1 is required).
    ContourDivergence { psi: f64 },
    /// A structural precondition of the requested operation was violated.
    SpecViolation(String),
    /// A convergence condition on parameter sums was violated; `excess`
    /// is the margin that had to be positive.
    ConvergenceConditionViolated { excess: f64 },
    /// The hypotheses of the inequality or monotonicity statement behind
    /// this operation do not hold for the given parameters.
    HypothesisFailed(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::NonPositiveParameter { value } => {
                write!(f, "parameter must be positive, got {value}")
            }
            Error::NonFiniteParameter { value } => {
                write!(f, "parameter must be finite, got {value}")
            }
            Error::PoleError { value } => {
                write!(f, "parameter {value} sits at a gamma pole")
            }
            Error::ShapeError { p, q } => {
                write!(f, "unsupported parameter shape p={p}, q={q}")
            }
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::NonConvergence { terms } => {
                write!(f, "series did not converge after {terms} terms")
            }
            Error::NoConvergence { levels } => {
                write!(f, "quadrature did not converge after {levels} levels")
            }
            Error::DegenerateParameters(msg) => {
                write!(f, "degenerate parameters: {msg}")
            }
            Error::ContourDivergence { psi } => {
                write!(f, "contour integrand decays like |s|^-{psi}; need psi > 1")
            }
            Error::SpecViolation(msg) => write!(f, "precondition violated: {msg}"),
            Error::ConvergenceConditionViolated { excess } => {
                write!(f, "convergence condition violated: excess {excess} must be positive")
            }
            Error::HypothesisFailed(msg) => write!(f, "hypothesis failed: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
