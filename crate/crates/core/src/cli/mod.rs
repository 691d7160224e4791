//! Configuration files, experiment orchestration and output files for the
//! `coldwave` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Outcome, Subcommand};
pub use config::{parse_config, parse_config_file, RunConfig, RunParams};

use crate::error::Error;

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else if matches!(err, Error::Io(_)) {
        1
    } else {
        2
    }
}
