//! File formats, run reports and the command-line front end for
//! `polyspline-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;
pub mod report;

pub use args::Cli;
pub use commands::{execute, run};
pub use error::{CliError, CliResult};
pub use report::{RunReport, Verdict};
