//! Library half of the `rootsqp` command: file formats, the benchmark
//! harness and the verification drivers behind each subcommand.

pub mod bench;
pub mod io;
pub mod sos;

use thiserror::Error;

/// Brute-force size cap when neither `--budget` nor `ROOTSQP_BUDGET` is set.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 1 << 24;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("budget refused: {0}")]
    Budget(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Argument(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

impl From<rootsqp::Error> for CliError {
    fn from(e: rootsqp::Error) -> Self {
        match e {
            rootsqp::Error::Budget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Argument(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
