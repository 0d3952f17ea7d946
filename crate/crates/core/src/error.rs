use thiserror::Error;

/// Errors raised by model validation, discretization and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter violation: {0}")]
    ParamViolation(String),

    #[error("invalid break configuration: {0}")]
    InvalidBreaks(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("field does not conform to mesh: {0}")]
    MeshMismatch(String),

    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("{solver} did not converge within {iterations} iterations (residual {residual:e})")]
    MaxIterations {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("clamping contradicts the unilateral constraint: {0}")]
    InfeasibleClamp(String),

    #[error("eigen solve failed: {0}")]
    EigenFailure(String),

    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
