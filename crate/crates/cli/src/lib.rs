//! Command-line front end: CSV data and a model file in, JSON or CSV out.

pub mod args;
pub mod config;
pub mod error;
pub mod input;
pub mod output;
pub mod run;

pub use args::Cli;
pub use config::RunConfig;
pub use error::{CliError, CliResult, Failure};
pub use output::{Artifact, OUTPUT_SCHEMA, SCHEMA_VERSION};
pub use run::{execute, fit, run};
