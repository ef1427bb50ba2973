use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid reinforcement function: {0}")]
    InvalidFunction(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("argument {value} outside [0, 1]")]
    Domain { value: f64 },

    #[error("derivative level must be positive, got {0}")]
    InvalidLevel(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero is not strictly stable (smallest eigenvalue of -J is {lambda})")]
    NotStrictlyStable { lambda: f64 },

    #[error("limit covariance requires lambda > 1/2, got {lambda}")]
    SlowRegime { lambda: f64 },

    #[error("insufficient sample: {qualified} of {total} runs ended near the zero")]
    InsufficientSample { qualified: usize, total: usize },

    #[error("zero-set consistency failure: {0}")]
    Consistency(String),
}
