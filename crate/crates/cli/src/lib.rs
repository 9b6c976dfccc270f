//! Configuration, subcommands and CSV output behind the `qtraj` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command, Report};
pub use config::{parse_config, prepare, render, RunConfig};
pub use error::{CliError, Result};
