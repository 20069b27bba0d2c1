//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by kernel evaluation, geometry construction, the greedy
/// decomposition, and rate fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A kernel or grid parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two points that must differ have identical coordinates.
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    /// Operands have incompatible spatial dimensions.
    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation that needs candidates received an empty set.
    #[error("empty candidate set")]
    EmptyCandidates,

    /// An operation that needs selected centers received none.
    #[error("empty selection")]
    EmptySelection,

    /// The pivot power fell below the numerical breakdown threshold, so a
    /// further Newton column cannot be formed reliably.
    #[error("pivot breakdown at candidate {index}: squared power {power_sq:e} below threshold")]
    PivotBreakdown { index: usize, power_sq: f64 },

    /// A dense factorization or solve failed, or produced values
    /// incompatible with positive definiteness.
    #[error("ill-conditioned kernel system: {0}")]
    IllConditioned(String),

    /// Not enough data rows to perform a least-squares fit.
    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A fill-distance fit was requested on a trace without recorded fill
    /// distances.
    #[error("trace has no recorded fill distances")]
    MissingFillData,

    /// Writing an output artifact failed.
    #[error("output error: {0}")]
    Output(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
