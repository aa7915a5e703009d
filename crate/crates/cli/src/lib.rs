//! Configuration, experiment runners, output and the property suite behind
//! the `qca-dsr` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod runners;
pub mod suite;

pub use config::{Experiment, ExperimentConfig, InitialState};
pub use error::{CliError, CliResult};
pub use runners::{run, RunOutcome};
