//! Command-line front end: constants tables, analytic curves, simulations and
//! comparisons, driven by flags and an optional TOML config file.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use dipolefield::Error as CoreError;

/// Exit status: comparison FAIL.
pub const EXIT_FAIL: i32 = 1;
/// Exit status: bad flags, config or input files.
pub const EXIT_USAGE: i32 = 2;
/// Exit status: a numerical method did not converge.
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable overriding the output directory.
pub const OUTPUT_DIR_ENV: &str = "DIPOLEFIELD_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: CoreError,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_numerical(e) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

fn is_numerical(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::Quadrature { .. } | CoreError::CutoffUnreachable { .. } | CoreError::NegativeDensity { .. }
    )
}

/// What a successful command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done | Outcome::Pass => 0,
            Outcome::Fail => EXIT_FAIL,
        }
    }
}
