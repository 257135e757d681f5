//! Scenario and experiment files, Monte Carlo sweeps and CSV output around
//! the `sptrade-core` solvers.

pub mod config;
pub mod experiment;
pub mod files;
pub mod output;

pub use config::{load_config, parse_config, Experiment, ExperimentConfig};
pub use experiment::{mc_power_saved, run_drop, run_experiment, run_experiment_with, RunError, SweepRow};
pub use files::{load_scenario, parse_scenario, save_scenario, scenario_to_string, FileError};
pub use output::{write_csv, CsvSink};
