//! Crate-wide error type.

use core::fmt;

/// Errors reported by the solver and its supporting machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument was outside its domain (non-finite input,
    /// nonpositive smoothing parameter, exponent outside `(0, 1]`).
    Domain(&'static str),
    /// Vector or matrix dimensions do not agree.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// The feasible set of a subproblem (or of the problem itself) is empty.
    Infeasible,
    /// A numerical procedure failed to reach its required accuracy.
    NumericalFailure(&'static str),
    /// A combinatorial routine was asked to run beyond its size guard.
    UnsupportedScale(&'static str),
    /// Solver configuration violates its invariants.
    InvalidConfig(&'static str),
    /// A caller-side contract was violated (infeasible start point,
    /// termination-test precondition, wrong problem class for a checker).
    Precondition(&'static str),
    /// The QP-solve budget was exhausted. In known-Lipschitz mode the budget
    /// is a multiple of the a-priori bound, so tripping it indicates a bug.
    BoundViolation { solves: u64, budget: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::DimensionMismatch {
                what,
                expected,
                actual,
            } => write!(
                f,
                "dimension mismatch for {what}: expected {expected}, got {actual}"
            ),
            Error::Infeasible => write!(f, "infeasible constraint system"),
            Error::NumericalFailure(what) => write!(f, "numerical failure: {what}"),
            Error::UnsupportedScale(what) => write!(f, "unsupported scale: {what}"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
            Error::BoundViolation { solves, budget } => {
                write!(f, "QP solve budget exhausted: {solves} solves, budget {budget}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
