use alloc::string::String;

/// Errors surfaced by the fitting, sampling and evaluation layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what} must be strictly positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("{what} must lie in {range}, got {value}")]
    OutOfRange {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// All pairwise distances vanished, so no bandwidth can be derived.
    #[error("degenerate sample set: all pairwise distances are zero")]
    DegenerateSamples,

    /// A bandwidth was requested for a variable block the value does not cover.
    #[error("no bandwidth stored for the {block} block")]
    UncoveredBlock { block: &'static str },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}, column {col}: {msg}")]
    Cell { row: usize, col: String, msg: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// Factorization failed even after jitter escalation.
    #[error("ill-conditioned system: factorization failed after jitter escalation")]
    IllConditioned,

    #[error("quadrature did not converge to the requested tolerance")]
    QuadratureFailed,

    #[error("action {index} = {value} outside the feasible box [{lo}, {hi}]")]
    ActionOutsideBox {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unknown benchmark id {0:?}")]
    UnknownBenchmark(String),
}

impl Error {
    /// True for failures of numerical machinery (as opposed to invalid input).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::IllConditioned | Error::QuadratureFailed)
    }
}

pub type Result<T> = core::result::Result<T, Error>;
