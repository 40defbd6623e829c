//! Library side of the `nhpp-sinr` tool: config parsing and experiment
//! drivers, kept separate from `main` so they can be tested directly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;

pub use config::{load_config, parse_config, ExperimentConfig, Kind, Overrides};
pub use error::{Category, CliError};
pub use run::{run, RunReport};

/// Loads, resolves and runs one experiment.
pub fn execute(kind: Kind, config: &std::path::Path, overrides: &Overrides) -> Result<RunReport, CliError> {
    let cfg = load_config(config)?.resolve(kind, overrides)?;
    run(kind, cfg)
}
