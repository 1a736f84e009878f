use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the verification machinery and the IO layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("ratio undefined for a zero field")]
    ZeroField,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("CFL violation at t = {t}: Courant number {courant:.4} exceeds safety {safety}")]
    Cfl { t: f64, courant: f64, safety: f64 },
    #[error("non-finite state at t = {t} after step {step}: {detail}")]
    Blowup { t: f64, step: u64, detail: String },
    #[error("time stamps not increasing: {prev} then {next}")]
    NonMonotoneTime { prev: f64, next: f64 },
    #[error("validity window empty: {0}")]
    WindowEmpty(String),
    #[error("empty series or window: {0}")]
    EmptyWindow(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("output directory {0} is locked by another run")]
    Locked(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
