use thiserror::Error;

/// Errors produced by the quaternion DSP stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by the zero quaternion")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is singular or numerically singular (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("Wiener system is singular (pivot {pivot} at column {column}); retry with a positive ridge")]
    SingularWiener { column: usize, pivot: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The adaptive filter blew up. `partial_trace` holds the squared errors
    /// logged before the abort.
    #[error("QLMS diverged at iteration {iteration}: squared error {squared_error}")]
    Diverged {
        iteration: usize,
        squared_error: f64,
        partial_trace: Vec<f64>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("experiment failed: {0}")]
    ExperimentFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
