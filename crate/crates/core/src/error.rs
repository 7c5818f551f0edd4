use thiserror::Error;

/// Errors surfaced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Collocation grid is too coarse for the requested dealiased evaluation.
    #[error("grid {m1}x{m2} too small for dealiased evaluation of {n1}x{n2} modes (need at least {need1}x{need2})")]
    GridTooSmall {
        m1: usize,
        m2: usize,
        n1: usize,
        n2: usize,
        need1: usize,
        need2: usize,
    },

    /// Grid and coefficient shapes do not line up.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// An operation needed collocated gradients that were not computed.
    #[error("physical grid is missing gradient planes")]
    MissingGradient,

    /// Degenerate input to a pairing that requires distinct nonzero vectors.
    #[error("degenerate pair: z and w must be distinct and nonzero")]
    DegeneratePair,

    /// A check was requested outside the parameter regime it is stated for.
    #[error("parameter regime violation: {context}")]
    RegimeViolation { context: String },

    /// Statistics were requested over an empty sample or ensemble.
    #[error("empty sample: {context}")]
    EmptySample { context: String },

    /// Trajectory does not retain enough state snapshots for the request.
    #[error("insufficient snapshots: {context}")]
    InsufficientSnapshots { context: String },

    /// Moment order outside the admissible range.
    #[error("moment order p = {p} outside [2, 2*sigma) with sigma = {sigma}")]
    MomentOrder { p: f64, sigma: f64 },

    /// Malformed or unreadable configuration input.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
