//! Error type shared by all solver modules.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors surfaced by channel generation, beamforming, and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix/vector dimensions do not agree.
    DimensionMismatch { expected: usize, got: usize, what: &'static str },
    /// A matrix fails the Hermitian-symmetry contract.
    NotHermitian { relative_asymmetry: f64 },
    /// A matrix expected to be positive semidefinite is not, beyond tolerance.
    NotPositiveSemidefinite { min_eigenvalue_bound: f64 },
    /// A linear system is singular or too ill-conditioned to trust.
    SingularSystem { condition_estimate: f64 },
    /// An eigenspace has a different rank than declared.
    RankMismatch { expected: usize, got: usize },
    /// Scenario or solver configuration violates an invariant.
    InvalidConfig(String),
    /// The problem instance admits no solution (empty null space, SINR
    /// threshold beyond the interference-limited feasibility boundary, or
    /// an exhausted power budget).
    Infeasible(String),
    /// A weak or strong user cannot be served (vanishing signal gain).
    UnserviceableUser { pair: usize, gain: f64 },
    /// An iterative solver hit its iteration cap without converging.
    MaxIterations { what: &'static str, iterations: usize },
    /// The fractional-programming outer loop stalled; carries the history of
    /// ratio estimates and auxiliary objective values for diagnosis.
    FractionalNonConvergence { etas: Vec<f64>, f_values: Vec<f64> },
    /// A numeric contract failed (non-convergent eigenpair, NaN, ...).
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got, what } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, got {got}")
            }
            Error::NotHermitian { relative_asymmetry } => {
                write!(f, "matrix is not Hermitian (relative asymmetry {relative_asymmetry:.3e})")
            }
            Error::NotPositiveSemidefinite { min_eigenvalue_bound } => {
                write!(f, "matrix is not PSD (eigenvalue below {min_eigenvalue_bound:.3e})")
            }
            Error::SingularSystem { condition_estimate } => {
                write!(f, "singular or ill-conditioned system (cond ~ {condition_estimate:.3e})")
            }
            Error::RankMismatch { expected, got } => {
                write!(f, "rank mismatch: expected {expected}, got {got}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::UnserviceableUser { pair, gain } => {
                write!(f, "pair {pair} cannot be served (signal gain {gain:.3e})")
            }
            Error::MaxIterations { what, iterations } => {
                write!(f, "{what} did not converge within {iterations} iterations")
            }
            Error::FractionalNonConvergence { etas, f_values } => {
                write!(
                    f,
                    "fractional programming stalled after {} iterations (last eta {:?}, last F {:?})",
                    etas.len(),
                    etas.last(),
                    f_values.last()
                )
            }
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl Error {
    /// Coarse category used by the CLI for exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "config",
            Error::Infeasible(_) | Error::UnserviceableUser { .. } => "infeasible",
            _ => "numeric",
        }
    }
}
