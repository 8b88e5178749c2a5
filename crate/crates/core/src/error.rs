//! Error types shared across the crate.

use core::fmt;

/// Rejected model input. Each variant names the first constraint found
/// violated; validation stops at the first error.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationError {
    /// Matrix, family list and mass vector disagree on dimensions.
    ShapeMismatch {
        expected: usize,
        found: usize,
        what: &'static str,
    },
    /// A row of the coefficient matrix does not sum to 1.
    RowSum { row: usize, sum: f64 },
    /// A column of the coefficient matrix is all zeros.
    EmptyColumn { column: usize },
    /// An entry of the coefficient matrix lies outside [0, 1].
    BadEntry { row: usize, column: usize, value: f64 },
    /// A logistic dependence parameter lies outside the open interval (0, 1).
    BadAlpha { column: usize, alpha: f64 },
    /// A variogram is asymmetric, has a nonzero diagonal, has the wrong
    /// dimension, or is not conditionally negative definite.
    BadVariogram { column: usize, reason: &'static str },
    /// A mass is outside (0, 1) or the masses do not sum to 1.
    BadMass { reason: &'static str },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::ShapeMismatch { expected, found, what } => {
                write!(f, "ShapeMismatch: {what}: expected {expected}, found {found}")
            }
            ValidationError::RowSum { row, sum } => {
                write!(f, "RowSumError: row {} sums to {sum}, expected 1", row + 1)
            }
            ValidationError::EmptyColumn { column } => {
                write!(f, "EmptyColumnError: column {} is all zeros", column + 1)
            }
            ValidationError::BadEntry { row, column, value } => {
                write!(
                    f,
                    "BadEntry: a[{},{}] = {value} outside [0, 1]",
                    row + 1,
                    column + 1
                )
            }
            ValidationError::BadAlpha { column, alpha } => {
                write!(f, "BadAlpha: column {}: alpha = {alpha} not in (0, 1)", column + 1)
            }
            ValidationError::BadVariogram { column, reason } => {
                write!(f, "BadVariogram: column {}: {reason}", column + 1)
            }
            ValidationError::BadMass { reason } => write!(f, "BadMass: {reason}"),
        }
    }
}

/// Failures in the dense symmetric linear algebra layer.
#[derive(Clone, Debug, PartialEq)]
pub enum LinalgError {
    /// A Cholesky pivot fell at or below the positive-definiteness
    /// threshold. Never repaired by jitter; the caller's matrix is bad.
    NotPositiveDefinite,
    /// The QMC point budget ran out before the requested standard error
    /// was reached. Carries the standard error actually achieved.
    ToleranceNotReached { std_error: f64 },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotPositiveDefinite => write!(f, "NotPositiveDefinite"),
            LinalgError::ToleranceNotReached { std_error } => {
                write!(f, "ToleranceNotReached: standard error {std_error}")
            }
        }
    }
}

/// Failures while evaluating stdfs or densities.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    /// A stdf argument had a negative coordinate.
    NegativeInput { index: usize, value: f64 },
    /// Underlying matrix factorization or MVN CDF failure.
    Linalg(LinalgError),
    /// Adaptive quadrature could not reach the requested tolerance.
    QuadratureFailure,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::NegativeInput { index, value } => {
                write!(f, "NegativeInput: coordinate {} is {value}", index + 1)
            }
            EvalError::Linalg(e) => write!(f, "{e}"),
            EvalError::QuadratureFailure => write!(f, "QuadratureFailure"),
        }
    }
}

impl From<LinalgError> for EvalError {
    fn from(e: LinalgError) -> Self {
        EvalError::Linalg(e)
    }
}

/// Failures during simulation.
#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    /// The rejection loop exceeded its proposal budget. Expected proposals
    /// per sample are at most d, so this signals numerical corruption.
    RejectionBudgetExceeded { sample_index: u64, budget: u64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::RejectionBudgetExceeded { sample_index, budget } => write!(
                f,
                "RejectionBudgetExceeded: sample {sample_index} used {budget} proposals"
            ),
        }
    }
}

impl core::error::Error for ValidationError {}
impl core::error::Error for LinalgError {}
impl core::error::Error for EvalError {}
impl core::error::Error for SimError {}
