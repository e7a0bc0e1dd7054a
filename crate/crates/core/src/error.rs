use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Ensemble parameters that violate a divisibility or range constraint.
    #[error("divisibility error: {0}")]
    Divisibility(String),

    /// Invalid (non-divisibility) parameter.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Random graph construction could not remove all conflicting edges.
    #[error("graph construction failed: {0}")]
    Construction(String),

    /// Input vectors whose length does not match the graph.
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// A bound update produced an empty interval. Cannot happen for a
    /// syndrome produced by the noiseless model.
    #[error("inconsistent syndrome: empty interval [{lo}, {hi}] at {location}")]
    InconsistentSyndrome { location: String, lo: i64, hi: i64 },

    /// Threshold search could not bracket a success/failure transition.
    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
