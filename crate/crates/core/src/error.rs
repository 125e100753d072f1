use thiserror::Error;

/// Errors raised by the algebraic and geometric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in SL(2,R): det = {det}")]
    NotUnimodular { det: f64 },

    #[error("element is not hyperbolic (|trace| = {trace_abs}); groups with parabolic or elliptic elements are not supported")]
    NotHyperbolic { trace_abs: f64 },

    #[error("generator {index} is not hyperbolic")]
    NotHyperbolicGenerator { index: usize },

    #[error(
        "no ping-pong certificate: {reason} (the certificate search is sound but not complete; \
         the group may still be Schottky, try longer translation lengths)"
    )]
    NoPingPongCertificate { reason: String },

    #[error("invariant form solve is degenerate: nullspace dimension {dim}, expected 1")]
    DegenerateSolve { dim: usize },

    #[error("generator index {index} out of range for a rank {rank} group")]
    BadIndex { index: usize, rank: usize },

    #[error("the identity has no closed geodesic")]
    EmptyWord,

    #[error("coboundary map has rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("currents have the same sign: {0} and {1}")]
    SameSign(f64, f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("LP numerical failure: {0}")]
    LpNumericalFailure(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
