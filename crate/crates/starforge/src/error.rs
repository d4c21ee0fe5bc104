use thiserror::Error;

use crate::kernel::scalar::{display_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a unit: constant term is zero")]
    NotAUnit,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid star: {0}")]
    InvalidStar(String),

    #[error("invalid deformation: {0}")]
    InvalidDeformation(String),

    #[error("degenerate extension: sum of lambda_i/beta_i(P) is {}", display_scalar(.value))]
    DegenerateExtension { value: Scalar },

    #[error("extension element u is not in the algebra: {0}")]
    StepNotInAlgebra(String),

    #[error("extension element u is not transverse: {0}")]
    StepNotTransverse(String),

    #[error("generation failed after {attempts} draws ({degenerate} hit the degeneracy hyperplane, {rejected} had no admissible element)")]
    GenerationFailed {
        attempts: usize,
        degenerate: usize,
        rejected: usize,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("the generators contain a unit, so the ideal is not proper")]
    NotAProperIdeal,

    #[error("contradiction: {0}")]
    Contradiction(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
