//! Run configs, trajectory files and the `wongspin` command line on top of
//! [`wongspin_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{AssertOptions, CommandOutcome};
pub use config::RunConfig;
pub use error::{CliError, Result};
