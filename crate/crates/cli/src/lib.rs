//! Command-line workbench: bound curves, Monte Carlo ramps, source fits and
//! analyzer timing, written as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Format, WorkbenchConfig};
pub use error::{CliError, CliResult};
