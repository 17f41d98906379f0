//! Batch driver for the `radpol` command-line tool.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, SampleSpec, Scheme};
pub use error::CliError;
pub use output::{emit_results, Format};
pub use run::{run, sweep, ResultRecord, SweepRecord};
