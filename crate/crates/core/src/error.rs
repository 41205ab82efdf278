use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range (expected {expected})")]
    InvalidIndex { index: usize, expected: &'static str },
    #[error("field carries circulation weight beta = {0}; the operation needs a finite-energy (beta = 0) field")]
    InfiniteEnergy(f64),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("non-finite state at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },
    #[error("linear solver did not reach tolerance: residual {residual:e} > {tolerance:e}")]
    SolverDiverged { residual: f64, tolerance: f64 },
    #[error("mollification radius {eps} is invalid for this grid: {reason}")]
    MollifierRadius { eps: f64, reason: String },
    #[error("membership audit failed: {0}")]
    Audit(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
