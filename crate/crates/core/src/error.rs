//! Error types shared across the crate.

use thiserror::Error;

/// Errors from simplex geometry operations.
#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("invalid simplex point: {reason}")]
    InvalidPoint { reason: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate pair: the two points coincide")]
    DegeneratePair,

    #[error("quantization produced zero total mass (T={t})")]
    ZeroMass { t: u64 },

    #[error("invalid curve: {reason}")]
    InvalidCurve { reason: String },

    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
}

/// Errors from sequence construction.
#[derive(Debug, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Simplex(#[from] SimplexError),

    #[error("symbol {symbol} out of range for alphabet size {k}")]
    SymbolOutOfRange { symbol: u16, k: usize },

    #[error("prefix index {n} out of range (sequence length {len})")]
    OutOfRange { n: usize, len: usize },

    #[error("invalid schedule: {reason}")]
    InvalidSchedule { reason: String },

    #[error("invalid budget: {reason}")]
    InvalidBudget { reason: String },

    #[error("segment length overflow at s={segment}: phi exceeds the integer range, reduce num_segments")]
    Overflow { segment: u32 },

    #[error("alphabet size {k} not representable in the requested storage mode")]
    AlphabetTooLarge { k: usize },

    #[error("construction bound violated in generation {generation}, segment {vertex}: {detail}")]
    BoundViolation {
        generation: u32,
        vertex: u32,
        detail: String,
    },
}

/// Errors from frequency estimators.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),

    #[error("prefix index {n} out of range (length {len})")]
    OutOfRange { n: usize, len: usize },

    #[error("empty estimation window: {reason}")]
    EmptyWindow { reason: String },

    #[error("conditioning event never occurred in the prefix")]
    NeverOccurred,

    #[error("selection rule selected no indices")]
    EmptySelection,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
}

/// Errors from credal-set operations.
#[derive(Debug, Error)]
pub enum CredalError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty credal set")]
    Empty,

    #[error("lower probability of the conditioning event is at or below {threshold}")]
    ZeroLowerProbability { threshold: f64 },

    #[error("no sign change on the bisection bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Errors from set-system algebra.
#[derive(Debug, Error)]
pub enum SetSystemError {
    #[error("omega size {omega} exceeds the {max}-element cap")]
    OmegaTooLarge { omega: usize, max: usize },

    #[error("element {element} out of range for omega size {omega}")]
    ElementOutOfRange { element: usize, omega: usize },

    #[error("closure exceeded the member budget of {budget}")]
    ClosureBudgetExceeded { budget: usize },

    #[error("the given system is not a pi-system")]
    NotPiSystem,

    #[error("invalid probability vector: {reason}")]
    InvalidProbability { reason: String },
}

/// Errors from file formats and JSON schemas.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {reason}")]
    Malformed { reason: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Sequence(#[from] SequenceError),

    #[error(transparent)]
    Simplex(#[from] SimplexError),

    #[error(transparent)]
    Credal(#[from] CredalError),

    #[error(transparent)]
    SetSystem(#[from] SetSystemError),
}

impl FormatError {
    pub fn malformed(reason: impl Into<String>) -> Self {
        FormatError::Malformed {
            reason: reason.into(),
        }
    }
}
