use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("zero radicand cannot be adjoined")]
    ZeroRadicand,
    #[error("scalar towers are not compatible (one must extend the other)")]
    TowerMismatch,
    #[error("scalar parse error: {0}")]
    ScalarParse(String),
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("algebra axiom violated: {0}")]
    InvalidAlgebra(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("subspace is not a graded Lie ideal: {0}")]
    NotAnIdeal(String),
    #[error("algebra is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("subalgebra is not subordinate to the functional: {0}")]
    NotSubordinate(String),
    #[error("truncation overflow: degree {needed} exceeds bound {bound}")]
    TruncationOverflow { needed: usize, bound: usize },
    #[error("descent failed within degree budget {budget}")]
    DescentBudgetExhausted { budget: usize },
    #[error("functional is invalid: {0}")]
    InvalidFunctional(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
