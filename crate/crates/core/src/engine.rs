//! The online loop: environments with Gaussian semi-bandit feedback,
//! index policies, pseudo-regret accounting, and the budgeted variant.
//!
//! Each run owns a counter-based generator stream seeded through a
//! documented mixing function of the master seed and the run index, so runs
//! are reproducible independently of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::action::ActionSet;
use crate::bonus::{per_arm_width, ArmStats, BonusFamily, BonusSpec, ConfidenceBonus, SetFunction};
use crate::budget::{ratio_binary_search, InnerSolver, RatioInstance};
use crate::error::{Error, Result};
use crate::matroid::{ConstraintMode, Matroid};
use crate::maximize::{
    greedy_bases, local_search, LinearFn, LocalSearchParams, ModularBoost, SplitObjective,
    WeightedSum,
};
use crate::scalar::Scalar;

/// Optional per-arm cost model for budgeted runs.
#[derive(Clone, Debug)]
pub struct CostModel<F> {
    pub means: Vec<F>,
    pub sigma: Vec<F>,
}

/// A stochastic environment: true means, independent Gaussian noise, and the
/// feasible action family.
#[derive(Clone, Debug)]
pub struct Environment<F> {
    matroid: Matroid,
    mode: ConstraintMode,
    mu_star: Vec<F>,
    sigma: Vec<F>,
    costs: Option<CostModel<F>>,
    optimal_action: ActionSet,
    optimal_value: F,
}

impl<F: Scalar> Environment<F> {
    pub fn new(
        matroid: Matroid,
        mode: ConstraintMode,
        mu_star: Vec<F>,
        sigma: Vec<F>,
        costs: Option<CostModel<F>>,
    ) -> Result<Self> {
        let n = matroid.ground_size();
        if mu_star.len() != n {
            return Err(Error::invalid(
                "mu_star length does not match the ground set",
            ));
        }
        if sigma.len() != n {
            return Err(Error::invalid("sigma length does not match the ground set"));
        }
        if sigma.iter().any(|s| s.is_nan() || *s < F::zero()) {
            return Err(Error::invalid("noise levels must be nonnegative"));
        }
        if let Some(c) = &costs {
            if c.means.len() != n || c.sigma.len() != n {
                return Err(Error::invalid(
                    "cost model length does not match the ground set",
                ));
            }
        }
        let optimal_action = matroid.linear_max_greedy(&mu_star, mode)?;
        let optimal_value = optimal_action.iter().map(|i| mu_star[i]).sum();
        Ok(Environment {
            matroid,
            mode,
            mu_star,
            sigma,
            costs,
            optimal_action,
            optimal_value,
        })
    }

    pub fn arms(&self) -> usize {
        self.matroid.ground_size()
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    pub fn mu_star(&self) -> &[F] {
        &self.mu_star
    }

    pub fn optimal_action(&self) -> &ActionSet {
        &self.optimal_action
    }

    pub fn optimal_value(&self) -> F {
        self.optimal_value
    }

    /// Pseudo-regret gap of an action.
    pub fn gap(&self, a: &ActionSet) -> F {
        self.optimal_value - a.iter().map(|i| self.mu_star[i]).sum()
    }
}

/// The implemented index policies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    Cucb,
    EscbGreedy,
    EscbLocalSearch,
    EscbKlGreedy,
    BudgetedRatio,
}

/// A policy: an index family plus solver parameters.
#[derive(Clone, Debug)]
pub struct Policy<F> {
    pub kind: PolicyKind,
    pub bonus: BonusSpec<F>,
    /// Local-search significance threshold.
    pub epsilon: F,
    /// Budgeted mode: approximation factor and bisection slack.
    pub kappa: F,
    pub eta: F,
    /// Budgeted mode: confidence family for the cost side.
    pub cost_bonus: Option<BonusSpec<F>>,
}

impl<F: Scalar> Policy<F> {
    pub fn cucb(m: usize) -> Self {
        Policy {
            kind: PolicyKind::Cucb,
            bonus: BonusSpec::cucb(m),
            epsilon: F::from_f64_c(0.1),
            kappa: F::from_f64_c(2.0),
            eta: F::from_f64_c(0.1),
            cost_bonus: None,
        }
    }

    pub fn escb_greedy(m: usize) -> Self {
        Policy {
            kind: PolicyKind::EscbGreedy,
            bonus: BonusSpec::escb(m),
            epsilon: F::from_f64_c(0.1),
            kappa: F::from_f64_c(2.0),
            eta: F::from_f64_c(0.1),
            cost_bonus: None,
        }
    }

    pub fn escb_local_search(m: usize, epsilon: F) -> Self {
        Policy {
            kind: PolicyKind::EscbLocalSearch,
            bonus: BonusSpec::escb(m),
            epsilon,
            kappa: F::from_f64_c(2.0),
            eta: F::from_f64_c(0.1),
            cost_bonus: None,
        }
    }

    pub fn escb_kl_greedy(m: usize) -> Self {
        Policy {
            kind: PolicyKind::EscbKlGreedy,
            bonus: BonusSpec::escb_kl(m),
            epsilon: F::from_f64_c(0.1),
            kappa: F::from_f64_c(2.0),
            eta: F::from_f64_c(0.1),
            cost_bonus: None,
        }
    }

    /// Budgeted ratio policy; `kappa` defaults to the inner solver's factor
    /// for the given mode.
    pub fn budgeted_ratio(m: usize, mode: ConstraintMode, eta: F) -> Self {
        let epsilon = F::from_f64_c(0.1);
        let kappa = match mode {
            ConstraintMode::Bases => F::from_f64_c(2.0),
            ConstraintMode::IndependentSets => F::from_f64_c(2.0) * (F::one() + epsilon),
        };
        Policy {
            kind: PolicyKind::BudgetedRatio,
            bonus: BonusSpec::escb(m),
            epsilon,
            kappa,
            eta,
            cost_bonus: Some(BonusSpec::escb(m)),
        }
    }

    /// Replaces the confidence family.
    pub fn with_bonus(mut self, bonus: BonusSpec<F>) -> Self {
        self.bonus = bonus;
        self
    }

    /// KL indices require bounded rewards; observations get clipped.
    fn clips_observations(&self) -> bool {
        self.bonus.family() == BonusFamily::Kl && self.bonus.radius().is_finite()
    }

    /// Policy/constraint compatibility.
    pub fn validate(&self, mode: ConstraintMode) -> Result<()> {
        match (self.kind, mode) {
            (PolicyKind::EscbGreedy | PolicyKind::EscbKlGreedy, ConstraintMode::Bases) => Ok(()),
            (PolicyKind::EscbGreedy | PolicyKind::EscbKlGreedy, _) => Err(Error::Config(
                "greedy index policies require basis constraints".into(),
            )),
            (PolicyKind::EscbLocalSearch, ConstraintMode::IndependentSets) => Ok(()),
            (PolicyKind::EscbLocalSearch, _) => Err(Error::Config(
                "local-search policies require independent-set constraints".into(),
            )),
            (PolicyKind::Cucb | PolicyKind::BudgetedRatio, _) => Ok(()),
        }
    }
}

/// Selects the next action for an index policy.
///
/// `cost_stats` is only consulted by the budgeted policy, which needs the
/// cost confidence region alongside the reward one.
pub fn select_action<F: Scalar>(
    policy: &Policy<F>,
    stats: &ArmStats<F>,
    cost_stats: Option<&ArmStats<F>>,
    m: &Matroid,
    mode: ConstraintMode,
) -> Result<ActionSet> {
    policy.validate(mode)?;
    if stats.arms() != m.ground_size() {
        return Err(Error::invalid("statistics do not match the ground set"));
    }
    match policy.kind {
        PolicyKind::Cucb => {
            let widths = per_arm_width(&policy.bonus, stats);
            let index: Vec<F> = stats
                .means()
                .iter()
                .zip(&widths)
                .map(|(&mu, &w)| mu + w)
                .collect();
            m.linear_max_greedy(&index, mode)
        }
        PolicyKind::EscbGreedy | PolicyKind::EscbKlGreedy => {
            let bonus = ConfidenceBonus {
                spec: &policy.bonus,
                stats,
            };
            let obj = SplitObjective::new(
                LinearFn::from_weights(stats.means().to_vec()),
                &bonus,
                false,
            );
            Ok(greedy_bases(m, &obj)?.set)
        }
        PolicyKind::EscbLocalSearch => {
            let conf = ConfidenceBonus {
                spec: &policy.bonus,
                stats,
            };
            let boosted;
            // Bounded-radius bonuses can vanish; restore positivity with a
            // 1/N^2 modular term.
            let bonus: &dyn SetFunction<F> = if policy.bonus.radius().is_finite() {
                let boost: Vec<F> = stats
                    .counts()
                    .iter()
                    .map(|&c| {
                        let c = F::from_count(c.max(1));
                        F::one() / (c * c)
                    })
                    .collect();
                boosted = ModularBoost::new(&conf, boost)?;
                &boosted
            } else {
                &conf
            };
            let obj =
                SplitObjective::new(LinearFn::from_weights(stats.means().to_vec()), bonus, true);
            Ok(local_search(m, &obj, &LocalSearchParams::new(policy.epsilon))?.set)
        }
        PolicyKind::BudgetedRatio => {
            let cost_stats = cost_stats
                .ok_or_else(|| Error::Config("the budgeted policy needs cost statistics".into()))?;
            select_budgeted(policy, stats, cost_stats, m, mode)
        }
    }
}

/// Budgeted selection: optimistic ratio minimization, preceded by a forced
/// exploration phase while any feasible arm is unplayed (the binary search
/// needs finite bonus evaluations).
fn select_budgeted<F: Scalar>(
    policy: &Policy<F>,
    reward_stats: &ArmStats<F>,
    cost_stats: &ArmStats<F>,
    m: &Matroid,
    mode: ConstraintMode,
) -> Result<ActionSet> {
    let n = m.ground_size();
    let inner = match mode {
        ConstraintMode::Bases => InnerSolver::GreedyBases,
        ConstraintMode::IndependentSets => {
            InnerSolver::LocalSearch(LocalSearchParams::new(policy.epsilon))
        }
    };
    let cost_spec = policy.cost_bonus.as_ref().ok_or_else(|| {
        Error::Config("the budgeted policy needs a cost confidence family".into())
    })?;

    // Reward upper bounds must stay nonnegative for the ratio instance.
    let reward_weights: Vec<F> = reward_stats
        .means()
        .iter()
        .map(|&x| x.max(F::zero()))
        .collect();
    let reward_conf = ConfidenceBonus {
        spec: &policy.bonus,
        stats: reward_stats,
    };

    let mut needs_exploration = false;
    for i in 0..n {
        if reward_stats.counts()[i] == 0 && m.is_independent(&ActionSet::from_indices(n, &[i])?)? {
            needs_exploration = true;
            break;
        }
    }
    if needs_exploration {
        // Maximize the optimistic reward; the unexplored tier makes this
        // cover unplayed arms as fast as the constraints allow.
        let bonus = WeightedSum::new(vec![(policy.kappa, &reward_conf as &dyn SetFunction<F>)])?;
        let obj = SplitObjective::new(LinearFn::from_weights(reward_weights), &bonus, true);
        return match inner {
            InnerSolver::GreedyBases => Ok(greedy_bases(m, &obj)?.set),
            InnerSolver::LocalSearch(p) => Ok(local_search(m, &obj, &p)?.set),
        };
    }

    let cost_conf = ConfidenceBonus {
        spec: cost_spec,
        stats: cost_stats,
    };
    let inst = RatioInstance::new(
        LinearFn::from_weights(cost_stats.means().to_vec()),
        &cost_conf,
        LinearFn::from_weights(reward_weights),
        &reward_conf,
        policy.kappa,
        policy.eta,
    )?;
    Ok(ratio_binary_search(m, &inst, &inner)?.set)
}

/// Cumulative pseudo-regret at each checkpoint of one run.
#[derive(Clone, Debug)]
pub struct RegretTrace<F> {
    pub checkpoints: Vec<u64>,
    pub cum_regret: Vec<F>,
    pub seed: u64,
    /// Observations clipped into the bonus radius (KL policies only).
    pub clipped: u64,
}

/// Derives the seed of run `run` from a master seed (splitmix64 finalizer
/// over `master + (run + 1) * golden`).
pub fn derive_run_seed(master: u64, run: u64) -> u64 {
    let mut z = master.wrapping_add((run.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one simulation to the horizon, recording cumulative pseudo-regret at
/// the requested checkpoints (the horizon itself is always recorded).
pub fn run_simulation<F: Scalar>(
    env: &Environment<F>,
    policy: &Policy<F>,
    horizon: u64,
    seed: u64,
    checkpoints: &[u64],
) -> Result<RegretTrace<F>>
where
    StandardNormal: Distribution<F>,
{
    if horizon < 1 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let mut marks: Vec<u64> = checkpoints
        .iter()
        .copied()
        .filter(|&t| t >= 1 && t <= horizon)
        .collect();
    marks.push(horizon);
    marks.sort_unstable();
    marks.dedup();

    let n = env.arms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: ArmStats<F> = ArmStats::new(n);
    let mut cum = F::zero();
    let mut trace = Vec::with_capacity(marks.len());
    let mut next_mark = 0usize;
    let mut clipped = 0u64;
    let clip = policy.clips_observations();
    let radius = policy.bonus.radius();

    for t in 1..=horizon {
        let a = select_action(policy, &stats, None, &env.matroid, env.mode)?;
        let mut obs = Vec::with_capacity(a.len());
        // The full reward vector is drawn every round, so the stream does
        // not depend on which arms get observed.
        for i in 0..n {
            let z: F = rng.sample(StandardNormal);
            let x = env.mu_star[i] + env.sigma[i] * z;
            if a.contains(i) {
                let x = if clip {
                    let c = x.max(-radius).min(radius);
                    if c != x {
                        clipped += 1;
                    }
                    c
                } else {
                    x
                };
                obs.push((i, x));
            }
        }
        stats.update(&a, &obs)?;
        let gap = env.gap(&a);
        debug_assert!(
            gap >= -F::from_f64_c(1e-12),
            "feasible gaps are nonnegative"
        );
        cum = cum + gap;
        while next_mark < marks.len() && marks[next_mark] == t {
            trace.push(cum);
            next_mark += 1;
        }
    }
    Ok(RegretTrace {
        checkpoints: marks,
        cum_regret: trace,
        seed,
        clipped,
    })
}

/// Outcome of a budgeted run.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetOutcome<F> {
    pub total_reward: F,
    pub rounds_played: u64,
}

/// Plays the budgeted policy until the next payment would exceed the
/// remaining budget (conservative stopping: the triggering round is not
/// played).
pub fn run_budgeted<F: Scalar>(
    env: &Environment<F>,
    policy: &Policy<F>,
    budget: F,
    seed: u64,
) -> Result<BudgetOutcome<F>>
where
    StandardNormal: Distribution<F>,
{
    if policy.kind != PolicyKind::BudgetedRatio {
        return Err(Error::Config(
            "run_budgeted requires the budgeted ratio policy".into(),
        ));
    }
    let costs = env
        .costs
        .as_ref()
        .ok_or_else(|| Error::Config("the environment has no cost model".into()))?;
    if costs.means.iter().any(|c| c.is_nan() || *c <= F::zero()) {
        return Err(Error::invalid("mean costs must be positive"));
    }
    let zero = BudgetOutcome {
        total_reward: F::zero(),
        rounds_played: 0,
    };
    if budget.is_nan() || budget <= F::zero() {
        return Ok(zero);
    }

    let n = env.arms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reward_stats: ArmStats<F> = ArmStats::new(n);
    let mut cost_stats: ArmStats<F> = ArmStats::new(n);
    let mut remaining = budget;
    let mut total_reward = F::zero();
    let mut rounds = 0u64;
    const ROUND_CAP: u64 = 50_000_000;

    loop {
        let a = select_action(
            policy,
            &reward_stats,
            Some(&cost_stats),
            &env.matroid,
            env.mode,
        )?;
        let mut reward_obs = Vec::with_capacity(a.len());
        let mut cost_obs = Vec::with_capacity(a.len());
        let mut payment = F::zero();
        for i in 0..n {
            let zr: F = rng.sample(StandardNormal);
            let zc: F = rng.sample(StandardNormal);
            if a.contains(i) {
                reward_obs.push((i, env.mu_star[i] + env.sigma[i] * zr));
                let c = costs.means[i] + costs.sigma[i] * zc;
                cost_obs.push((i, c));
                payment = payment + c;
            }
        }
        if payment > remaining {
            break;
        }
        remaining = remaining - payment;
        total_reward = total_reward + reward_obs.iter().map(|&(_, x)| x).sum();
        reward_stats.update(&a, &reward_obs)?;
        cost_stats.update(&a, &cost_obs)?;
        rounds += 1;
        if rounds > ROUND_CAP {
            return Err(Error::Numerical {
                context: "run_budgeted",
                details: "round cap exceeded; realized costs may be consistently nonpositive"
                    .into(),
            });
        }
    }
    Ok(BudgetOutcome {
        total_reward,
        rounds_played: rounds,
    })
}
