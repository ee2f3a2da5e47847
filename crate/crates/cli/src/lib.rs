//! Batch front end for `tmk`: run configs in, JSON reports and CSV scans out.
//!
//! Exit codes: 0 for a clean run, 1 for input errors, 2 when a report
//! contains consistency violations.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

pub use config::{Check, ModelConfig, RunConfig};
pub use run::{classify, scan_lambda, verify, Grid, Outcome, Suite};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Model(#[from] tmk::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad argument: {0}")]
    Argument(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}
