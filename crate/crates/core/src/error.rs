use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = PadeError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PadeError {
    #[error("input contains non-finite values")]
    NonFinite,

    #[error("factorization did not converge: {0}")]
    ConvergenceFailure(String),

    /// A diagonal entry of the triangular factor fell below the relative threshold.
    #[error("matrix is numerically rank deficient (|R[{index}, {index}]| / max |R| = {ratio:e})")]
    RankDeficient { index: usize, ratio: f64 },

    #[error("every polynomial coefficient is zero")]
    AllZero,

    #[error("pole at the origin cannot generate a series")]
    ZeroPole,

    #[error("degenerate Padé system: {0}")]
    Degenerate(String),

    #[error("need {needed} series coefficients, only {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("Vandermonde system in the inverse poles is numerically singular")]
    SingularVandermonde,

    #[error("poles {0} and {1} coincide")]
    DuplicatePole(Complex64, Complex64),

    #[error("evaluation point {0} hits a pole")]
    PoleHit(Complex64),

    #[error("invalid conformation: {0}")]
    InvalidConformation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every pole was removed and no numerator-only approximant exists (k < 0).
    #[error("pole count collapsed to zero for k = {k}; no polynomial-only approximant exists")]
    Collapse { k: i64 },

    #[error("spurious-pole loop exceeded {0} iterations")]
    NonTerminating(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl PadeError {
    /// True for failures that come from the numerics of the problem rather than
    /// from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PadeError::ConvergenceFailure(_)
                | PadeError::RankDeficient { .. }
                | PadeError::Degenerate(_)
                | PadeError::SingularVandermonde
                | PadeError::DuplicatePole(..)
                | PadeError::PoleHit(_)
                | PadeError::Collapse { .. }
                | PadeError::NonTerminating(_)
        )
    }
}
