//! Run configuration, deterministic CSV/JSON output and the `isrs`
//! command-line tool.

mod cli;
mod config;
mod error;
pub mod output;

pub use cli::{oracle_check, run, EXIT_ACCEPTANCE, EXIT_INVALID, EXIT_OK, EXIT_USAGE};
pub use config::{
    load_config, Chi0Config, GridConfig, InteractionConfig, LoadedConfig, ModeConfig, OracleConfig, ProbeConfig, PumpConfig,
    RunConfig, SweepConfig,
};
pub use error::CliError;
