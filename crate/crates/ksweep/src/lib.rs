//! File formats, reports and command implementations behind the `ksweep`
//! binary.

pub mod commands;
pub mod error;
pub mod formats;
pub mod report;
pub mod text;

pub use error::{CliError, CliResult};
pub use report::{Report, Settings};
