//! Experiment harness for matroid semi-bandit simulations: config parsing,
//! parallel execution, CSV emission, and the offline `solve` subcommand.

pub mod config;
pub mod csvout;
pub mod error;
pub mod experiment;
pub mod solve;

pub use config::{ExperimentConfig, InstanceFile, SolveAlgo};
pub use csvout::{format_csv, write_csv};
pub use error::{CliError, CliResult};
pub use experiment::{build_experiment, run_experiment, Experiment, ResultRow};
pub use solve::solve_instance;

/// Reads the worker-count cap from `MSB_THREADS`.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var("MSB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::config(format!("MSB_THREADS: {e}"))),
        Ok(s) => {
            let v: usize = s.parse().map_err(|_| {
                CliError::config(format!("MSB_THREADS must be an integer, got \"{s}\""))
            })?;
            Ok(Some(v))
        }
    }
}
