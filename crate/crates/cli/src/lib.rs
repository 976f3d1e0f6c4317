//! Batch front end of the `bdflow` solver.

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, Cli, Command, CommandKind, FileConfig, Flags, RunConfig};
pub use error::CliError;
pub use run::{dispatch, Outcome};
