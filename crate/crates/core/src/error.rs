use thiserror::Error;

use crate::complex::FaceId;

/// Errors raised by the library. Domain verdicts (non-saddle, ambiguity found)
/// are reported in result structs, not here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("derivative undefined at the zero vector")]
    ZeroVector,

    #[error("norm is not differentiable at {at:?}; use one-sided derivatives")]
    NonSmoothPoint { at: Vec<f64> },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("point is not incident to face {face}")]
    Incidence { face: FaceId },

    #[error("no face sequence within the search bound connects the points")]
    OutOfRange,

    #[error("midpoint is not unique: {0}")]
    NonUniqueMidpoint(String),

    #[error("sequence is not admissible: 2*delta = {twice_delta} >= rho = {rho}")]
    NotAdmissible { twice_delta: f64, rho: f64 },

    #[error("no convergence after {iterations} iterations (last displacement {last_displacement:e})")]
    NonConvergence {
        iterations: usize,
        last_displacement: f64,
        /// Tail of (iteration, displacement) pairs.
        tail: Vec<(usize, f64)>,
    },

    #[error("complex carries non-smooth norms; operation requires C1 norms")]
    NonSmoothComplex,

    #[error("target unreachable in the discretization graph")]
    Unreachable,

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
