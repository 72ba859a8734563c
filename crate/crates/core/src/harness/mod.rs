//! Command implementations behind the `seminorm` binary.
//!
//! Exit codes: 0 success, 1 inequality violations, 2 invalid input or flags,
//! 3 an operator outside `B_A`, 4 a numerical failure.

pub mod commands;
pub mod problem;
pub mod report;

use std::path::Path;

use crate::error::Error;

pub use commands::{
    compute, range, range_csv, tightness, verify, ComputeOutput, OperatorOutput, TightnessRequest, VerifyRequest,
};
pub use problem::{Problem, ProblemFile, OPERATOR_NAMES};
pub use report::{config_fingerprint, RunReport, Timing, ToleranceRecord, TOOL_VERSION};

/// Environment variable overriding the default master seed.
pub const SEED_ENV: &str = "SEMINORM_SEED";

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_IN_BA: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed input: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Io { .. } | HarnessError::Parse(_) | HarnessError::Csv(_) => EXIT_USAGE,
            HarnessError::Core(e) => match e {
                Error::NotInBA { .. } => EXIT_NOT_IN_BA,
                Error::ConvergenceFailure { .. } | Error::DegenerateSample => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            },
        }
    }
}
