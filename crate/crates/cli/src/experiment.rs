//! Experiment resolution, parallel execution, and aggregation.

use rayon::prelude::*;

use msb_core::engine::{derive_run_seed, run_simulation, Environment, Policy, RegretTrace};
use msb_core::{ConstraintMode, Matroid};

use crate::config::{resolve_bonus, AlgorithmName, ExperimentConfig, MeansConfig, SigmaConfig};
use crate::error::{CliError, CliResult};

/// A fully resolved experiment.
#[derive(Debug)]
pub struct Experiment {
    pub matroid: Matroid,
    pub mode: ConstraintMode,
    pub mu_star: Vec<f64>,
    pub sigma: Vec<f64>,
    pub horizon: u64,
    pub runs: u32,
    pub algorithms: Vec<(String, Policy<f64>)>,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
}

/// One aggregated CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: String,
    pub round: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub runs: u32,
}

/// The complete graph on five vertices with the four spokes of vertex 0
/// first, so the high-mean arms of the presets form a spanning tree
/// (bases preset) or an independent set (independent-sets preset).
pub fn k5_star_first() -> Matroid {
    let edges = vec![
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 3),
        (2, 4),
        (3, 4),
    ];
    Matroid::graphic(5, edges).expect("static edge list is valid")
}

const K5_GAP: f64 = 0.1;

fn preset(name: &str) -> Option<(Matroid, ConstraintMode, Vec<f64>)> {
    let m = k5_star_first();
    let rank = m.rank(); // 4
    match name {
        "bases_k5" => {
            let mu = (0..m.ground_size())
                .map(|i| 1.0 + if i < rank { K5_GAP } else { 0.0 })
                .collect();
            Some((m, ConstraintMode::Bases, mu))
        }
        "independent_k5" => {
            let mu = (0..m.ground_size())
                .map(|i| K5_GAP * if i < rank - 1 { 1.0 } else { -1.0 })
                .collect();
            Some((m, ConstraintMode::IndependentSets, mu))
        }
        _ => None,
    }
}

/// Default checkpoint schedule: 30 log-spaced rounds from 10 to the horizon,
/// deduplicated, plus the horizon.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let lo = 10.0f64.min(horizon as f64).max(1.0);
    let hi = horizon as f64;
    let mut pts: Vec<u64> = (0..30)
        .map(|i| {
            let f = i as f64 / 29.0;
            (lo.ln() + (hi.ln() - lo.ln()) * f).exp().round() as u64
        })
        .map(|t| t.clamp(1, horizon))
        .collect();
    pts.push(horizon);
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Resolves a parsed config into a runnable experiment.
pub fn build_experiment(cfg: &ExperimentConfig) -> CliResult<Experiment> {
    let (matroid, mode, mu_star) = match &cfg.means {
        MeansConfig::Preset(name) => {
            let Some((m, mode, mu)) = preset(name) else {
                return Err(CliError::config(format!(
                    "unknown means preset \"{name}\"; expected bases_k5 or independent_k5"
                )));
            };
            if cfg.matroid.is_some() || cfg.mode.is_some() {
                return Err(CliError::config(
                    "preset means fix the matroid and mode; remove those keys",
                ));
            }
            (m, mode, mu)
        }
        MeansConfig::Explicit(mu) => {
            let Some(mcfg) = &cfg.matroid else {
                return Err(CliError::config("explicit means require a matroid"));
            };
            let Some(mode) = cfg.mode else {
                return Err(CliError::config("explicit means require a mode"));
            };
            let m = mcfg.build()?;
            if mu.len() != m.ground_size() {
                return Err(CliError::config(format!(
                    "means has {} entries but the ground set has {}",
                    mu.len(),
                    m.ground_size()
                )));
            }
            (m, ConstraintMode::from(mode), mu.clone())
        }
    };

    let n = matroid.ground_size();
    let sigma = match cfg.noise.as_ref().map(|c| &c.sigma) {
        None => vec![1.0; n],
        Some(SigmaConfig::Scalar(s)) => vec![*s; n],
        Some(SigmaConfig::PerArm(v)) => {
            if v.len() != n {
                return Err(CliError::config(format!(
                    "noise.sigma has {} entries but the ground set has {n}",
                    v.len()
                )));
            }
            v.clone()
        }
    };
    if sigma.iter().any(|s| s.is_nan() || *s < 0.0) {
        return Err(CliError::config("noise.sigma entries must be nonnegative"));
    }

    if cfg.horizon < 1 {
        return Err(CliError::config("horizon must be at least 1"));
    }
    if cfg.runs < 1 {
        return Err(CliError::config("runs must be at least 1"));
    }
    if cfg.algorithms.is_empty() {
        return Err(CliError::config("algorithms must not be empty"));
    }

    let rank = matroid.rank();
    let mut algorithms = Vec::with_capacity(cfg.algorithms.len());
    for a in &cfg.algorithms {
        if a.epsilon.is_some() && a.name != AlgorithmName::EscbLocalSearch {
            return Err(CliError::config(format!(
                "epsilon only applies to escb_localsearch, found it on {}",
                a.name.as_str()
            )));
        }
        let policy = match a.name {
            AlgorithmName::Cucb => Policy::cucb(rank),
            AlgorithmName::EscbGreedy => Policy::escb_greedy(rank),
            AlgorithmName::EscbLocalSearch => {
                Policy::escb_local_search(rank, a.epsilon.unwrap_or(0.1))
            }
            AlgorithmName::EscbKlGreedy => Policy::escb_kl_greedy(rank),
        };
        let policy = policy
            .clone()
            .with_bonus(resolve_bonus(a.bonus.as_ref(), policy.bonus)?);
        policy
            .validate(mode)
            .map_err(|e| CliError::config(format!("algorithm {}: {e}", a.name.as_str())))?;
        let name = a.name.as_str().to_string();
        if algorithms.iter().any(|(existing, _)| *existing == name) {
            return Err(CliError::config(format!("duplicate algorithm \"{name}\"")));
        }
        algorithms.push((name, policy));
    }

    let checkpoints = match &cfg.checkpoints {
        None => default_checkpoints(cfg.horizon),
        Some(list) => {
            let mut pts: Vec<u64> = list
                .iter()
                .copied()
                .filter(|&t| t >= 1 && t <= cfg.horizon)
                .collect();
            pts.push(cfg.horizon);
            pts.sort_unstable();
            pts.dedup();
            pts
        }
    };

    Ok(Experiment {
        matroid,
        mode,
        mu_star,
        sigma,
        horizon: cfg.horizon,
        runs: cfg.runs,
        algorithms,
        seed: cfg.seed,
        checkpoints,
    })
}

/// Runs every algorithm for the configured number of independent runs and
/// aggregates mean and sample standard deviation per checkpoint.
///
/// Runs are parallelized across a worker pool (`threads`; zero or `None`
/// means the rayon default). Each run's stream depends only on the master
/// seed and its run index, so results do not depend on the thread count.
pub fn run_experiment(exp: &Experiment, threads: Option<usize>) -> CliResult<Vec<ResultRow>> {
    let env = Environment::new(
        exp.matroid.clone(),
        exp.mode,
        exp.mu_star.clone(),
        exp.sigma.clone(),
        None,
    )
    .map_err(|e| CliError::runtime(format!("environment: {e}")))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::runtime(format!("worker pool: {e}")))?;

    let mut rows = Vec::new();
    for (name, policy) in &exp.algorithms {
        let traces: Vec<Result<RegretTrace<f64>, msb_core::Error>> = pool.install(|| {
            (0..exp.runs)
                .into_par_iter()
                .map(|run| {
                    run_simulation(
                        &env,
                        policy,
                        exp.horizon,
                        derive_run_seed(exp.seed, run as u64),
                        &exp.checkpoints,
                    )
                })
                .collect()
        });
        let mut ok = Vec::with_capacity(traces.len());
        for (run, t) in traces.into_iter().enumerate() {
            ok.push(t.map_err(|e| CliError::runtime(format!("{name} run {run}: {e}")))?);
        }
        rows.extend(aggregate(name, &ok, exp.runs));
    }
    rows.sort_by(|a, b| a.algorithm.cmp(&b.algorithm).then(a.round.cmp(&b.round)));
    Ok(rows)
}

/// Two-pass mean and sample standard deviation per checkpoint.
fn aggregate(name: &str, traces: &[RegretTrace<f64>], runs: u32) -> Vec<ResultRow> {
    let checkpoints = &traces[0].checkpoints;
    let r = traces.len() as f64;
    checkpoints
        .iter()
        .enumerate()
        .map(|(j, &round)| {
            let mean = traces.iter().map(|t| t.cum_regret[j]).sum::<f64>() / r;
            let std = if traces.len() < 2 {
                0.0
            } else {
                let ss = traces
                    .iter()
                    .map(|t| {
                        let d = t.cum_regret[j] - mean;
                        d * d
                    })
                    .sum::<f64>();
                (ss / (r - 1.0)).sqrt()
            };
            ResultRow {
                algorithm: name.to_string(),
                round,
                mean_regret: mean,
                std_regret: std,
                runs,
            }
        })
        .collect()
}
