//! `msb` — run matroid semi-bandit experiments and offline solvers.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use msb_cli::config::{parse_json, ExperimentConfig, InstanceFile, SolveAlgo};
use msb_cli::{
    build_experiment, run_experiment, solve_instance, threads_from_env, write_csv, CliError,
    CliResult,
};

#[derive(Parser)]
#[command(
    name = "msb",
    about = "Matroid semi-bandit simulations and combinatorial solvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a regret experiment from a JSON config and write a CSV.
    Simulate {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's run count.
        #[arg(long)]
        runs: Option<u32>,
    },
    /// Solve one offline instance and print the result JSON.
    Solve {
        /// Instance description (JSON).
        #[arg(long)]
        instance: PathBuf,
        /// greedy | localsearch | brute | ratio (overrides the instance).
        #[arg(long)]
        algo: Option<String>,
        /// Local-search significance threshold.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Ratio-search slack.
        #[arg(long)]
        eta: Option<f64>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            runs,
        } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::config(format!("reading {}: {e}", config.display())))?;
            let mut cfg: ExperimentConfig = parse_json(&text, "config")?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(runs) = runs {
                cfg.runs = runs;
            }
            let exp = build_experiment(&cfg)?;
            let rows = run_experiment(&exp, threads_from_env()?)?;
            write_csv(&rows, &out)?;
            Ok(())
        }
        Command::Solve {
            instance,
            algo,
            epsilon,
            eta,
        } => {
            let text = fs::read_to_string(&instance)
                .map_err(|e| CliError::config(format!("reading {}: {e}", instance.display())))?;
            let inst: InstanceFile = parse_json(&text, "instance")?;
            let algo = match algo {
                Some(s) => SolveAlgo::parse(&s)?,
                None => inst.algo.ok_or_else(|| {
                    CliError::config("no algo: pass --algo or set \"algo\" in the instance")
                })?,
            };
            let result = solve_instance(&inst, algo, epsilon, eta)?;
            println!("{result}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
