//! Command-line front end: JSON job configuration, dispatch to the
//! computations in `tadic-core`, and JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Command, JobConfig, Overrides};
pub use error::CliError;
pub use report::{RunReport, Status};
pub use run::run;
