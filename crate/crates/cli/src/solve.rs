//! The offline `solve` subcommand: one maximization or ratio minimization
//! over an instance file, result as JSON on stdout.

use serde_json::{json, Value};

use msb_core::bonus::{ArmStats, BonusSpec, ConfidenceBonus, SetFunction};
use msb_core::budget::{ratio_binary_search, InnerSolver, RatioInstance};
use msb_core::matroid::ConstraintMode;
use msb_core::maximize::{
    brute_force_max, greedy_bases, local_search, LinearFn, LocalSearchParams, MaximizeOutcome,
    SplitObjective, ZeroBonus,
};

use crate::config::{BonusWithStats, InstanceFile, SolveAlgo};
use crate::error::{CliError, CliResult};

/// Resolved bonus with owned backing state.
struct BonusState {
    spec: BonusSpec<f64>,
    stats: ArmStats<f64>,
}

impl BonusState {
    fn build(cfg: &BonusWithStats, n: usize, rank: usize) -> CliResult<Self> {
        let stats = cfg.stats.build()?;
        if stats.arms() != n {
            return Err(CliError::config(format!(
                "stats track {} arms but the ground set has {n}",
                stats.arms()
            )));
        }
        let spec = crate::config::resolve_bonus(Some(&cfg.spec), BonusSpec::escb(rank))?;
        Ok(BonusState { spec, stats })
    }

    fn as_fn(&self) -> ConfidenceBonus<'_, f64> {
        ConfidenceBonus {
            spec: &self.spec,
            stats: &self.stats,
        }
    }
}

/// Runs one solve request and renders the result JSON.
pub fn solve_instance(
    inst: &InstanceFile,
    algo: SolveAlgo,
    epsilon_override: Option<f64>,
    eta_override: Option<f64>,
) -> CliResult<Value> {
    let matroid = inst.matroid.build()?;
    let mode = ConstraintMode::from(inst.mode);
    let n = matroid.ground_size();
    let rank = matroid.rank();
    let epsilon = epsilon_override.or(inst.epsilon).unwrap_or(0.1);

    match algo {
        SolveAlgo::Greedy | SolveAlgo::Localsearch | SolveAlgo::Brute => {
            let Some(linear) = &inst.linear else {
                return Err(CliError::config("this algo requires a \"linear\" section"));
            };
            if linear.weights.len() != n {
                return Err(CliError::config(format!(
                    "linear.weights has {} entries but the ground set has {n}",
                    linear.weights.len()
                )));
            }
            let bonus_state = inst
                .bonus
                .as_ref()
                .map(|b| BonusState::build(b, n, rank))
                .transpose()?;
            let conf = bonus_state.as_ref().map(|b| b.as_fn());
            let zero = ZeroBonus;
            let bonus: &dyn SetFunction<f64> = match &conf {
                Some(c) => c,
                None => &zero,
            };
            let obj = SplitObjective::new(
                LinearFn::new(linear.weights.clone(), linear.offset),
                bonus,
                conf.is_some(),
            );
            let outcome: MaximizeOutcome<f64> = match algo {
                SolveAlgo::Greedy => {
                    if mode != ConstraintMode::Bases {
                        return Err(CliError::config("algo greedy requires mode \"bases\""));
                    }
                    greedy_bases(&matroid, &obj)
                }
                SolveAlgo::Localsearch => {
                    if mode != ConstraintMode::IndependentSets {
                        return Err(CliError::config(
                            "algo localsearch requires mode \"independent_sets\"",
                        ));
                    }
                    local_search(&matroid, &obj, &LocalSearchParams::new(epsilon))
                }
                SolveAlgo::Brute => brute_force_max(&matroid, &obj, mode),
                SolveAlgo::Ratio => unreachable!(),
            }
            .map_err(|e| CliError::runtime(e.to_string()))?;
            Ok(json!({
                "set": outcome.set.indices(),
                "value": outcome.value.value,
                "unexplored": outcome.value.unexplored,
                "iterations": outcome.iterations,
            }))
        }
        SolveAlgo::Ratio => {
            let Some(cost) = &inst.cost else {
                return Err(CliError::config("algo ratio requires a \"cost\" section"));
            };
            let Some(reward) = &inst.reward else {
                return Err(CliError::config("algo ratio requires a \"reward\" section"));
            };
            let Some(cost_bonus) = &inst.cost_bonus else {
                return Err(CliError::config(
                    "algo ratio requires a \"cost_bonus\" section",
                ));
            };
            let Some(reward_bonus) = &inst.reward_bonus else {
                return Err(CliError::config(
                    "algo ratio requires a \"reward_bonus\" section",
                ));
            };
            let inner = match mode {
                ConstraintMode::Bases => InnerSolver::GreedyBases,
                ConstraintMode::IndependentSets => {
                    InnerSolver::LocalSearch(LocalSearchParams::new(epsilon))
                }
            };
            let kappa = inst.kappa.unwrap_or_else(|| inner.kappa());
            let eta = eta_override.or(inst.eta).unwrap_or(0.1);
            let f1 = BonusState::build(cost_bonus, n, rank)?;
            let f2 = BonusState::build(reward_bonus, n, rank)?;
            let f1_fn = f1.as_fn();
            let f2_fn = f2.as_fn();
            let ratio_inst = RatioInstance::new(
                LinearFn::new(cost.weights.clone(), cost.offset),
                &f1_fn,
                LinearFn::new(reward.weights.clone(), reward.offset),
                &f2_fn,
                kappa,
                eta,
            )
            .map_err(|e| CliError::config(e.to_string()))?;
            let out = ratio_binary_search(&matroid, &ratio_inst, &inner)
                .map_err(|e| CliError::runtime(e.to_string()))?;
            Ok(json!({
                "set": out.set.indices(),
                "lambda_lower": out.lambda_lower,
                "lambda_upper": out.lambda_upper,
                "iterations": out.iterations,
            }))
        }
    }
}
