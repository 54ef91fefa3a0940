//! Experiment runner for broadcast local service insertion studies: config
//! parsing, orchestration over schemes, and CSV/JSON/PGM output.

pub mod config;
pub mod experiment;
pub mod heatmap;
pub mod oracle_check;
pub mod output;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, simulate, ExperimentResults, RunError, SchemeResult};
