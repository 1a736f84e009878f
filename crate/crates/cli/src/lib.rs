//! Run orchestration for the micropolar solver: config files, diagnostics CSV,
//! checkpoints and the verification suites.

pub mod checkpoint;
pub mod config;
pub mod output;
pub mod runner;
pub mod verify;

pub use config::RunConfig;
pub use runner::{resume, run, RunFailure, RunSummary};
