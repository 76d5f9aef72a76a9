//! Experiment harness for the `tvprox` library: loads a config, builds the
//! problem and graph schedule, runs the method and writes traces.

pub mod commands;
pub mod config;
pub mod setup;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// A check ran and failed (invalid schedule, prox mismatch).
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const STEP_SIZE: u8 = 3;
    pub const NUMERICAL: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tvprox::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use tvprox::Error as E;
        match self {
            CliError::Core(E::StepSize { .. }) => exit::STEP_SIZE,
            CliError::Core(E::NonFinite { .. }) => exit::NUMERICAL,
            _ => exit::CONFIG,
        }
    }
}
