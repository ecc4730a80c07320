//! File formats, configuration and report generation for the track dynamics
//! model in `raildyn-core`. The `raildyn` binary is a thin clap front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

pub use commands::{execute, Execution};
pub use config::{ConfigFile, Overrides, Report, Scenario};
pub use error::{CliError, Result};
