//! Ratio minimization `(L1 - F1)^+ / (L2 + F2)` over independent sets or
//! bases, by binary search on the Lagrangian multiplier.
//!
//! `L1` is a cost with an optional entry price (its offset), `F1` a positive
//! cost bonus, `L2` a normalized nonnegative reward, `F2` a positive reward
//! bonus. For a fixed multiplier, minimizing the Lagrangian is a single
//! `L + F` maximization, so the approximate maximizers of [`crate::maximize`]
//! drive the search; the sign of the approximation Lagrangian at their
//! output brackets the optimal ratio from both sides.

use crate::action::ActionSet;
use crate::bonus::SetFunction;
use crate::error::{Error, Result};
use crate::matroid::{ConstraintMode, Matroid};
use crate::maximize::{
    greedy_bases, local_search, LinearFn, LocalSearchParams, SplitObjective, WeightedSum,
};
use crate::scalar::Scalar;

/// A cost/reward ratio instance.
pub struct RatioInstance<'a, F: Scalar> {
    /// Cost `L1`; the offset is the entry price and must be nonnegative.
    pub cost: LinearFn<F>,
    /// Cost bonus `F1`: normalized, nondecreasing, positive off the empty set.
    pub cost_bonus: &'a dyn SetFunction<F>,
    /// Reward `L2`: normalized (zero offset) with nonnegative weights.
    pub reward: LinearFn<F>,
    /// Reward bonus `F2`: normalized, nondecreasing, positive off the empty set.
    pub reward_bonus: &'a dyn SetFunction<F>,
    /// Approximation factor of the inner maximizer.
    pub kappa: F,
    /// Tolerance slack for the bisection stopping rule.
    pub eta: F,
}

impl<'a, F: Scalar> RatioInstance<'a, F> {
    pub fn new(
        cost: LinearFn<F>,
        cost_bonus: &'a dyn SetFunction<F>,
        reward: LinearFn<F>,
        reward_bonus: &'a dyn SetFunction<F>,
        kappa: F,
        eta: F,
    ) -> Result<Self> {
        if kappa.is_nan() || kappa < F::one() {
            return Err(Error::invalid("kappa must be at least 1"));
        }
        if eta.is_nan() || eta <= F::zero() {
            return Err(Error::invalid("eta must be positive"));
        }
        if cost.offset < F::zero() {
            return Err(Error::invalid(
                "the entry price (cost offset) must be nonnegative",
            ));
        }
        if reward.offset != F::zero() {
            return Err(Error::invalid("the reward function must be normalized"));
        }
        if reward.weights.iter().any(|w| w.is_nan() || *w < F::zero()) {
            return Err(Error::invalid("reward weights must be nonnegative"));
        }
        Ok(RatioInstance {
            cost,
            cost_bonus,
            reward,
            reward_bonus,
            kappa,
            eta,
        })
    }
}

/// Inner maximizer used by the binary search; fixes the constraint family.
#[derive(Clone, Copy, Debug)]
pub enum InnerSolver<F> {
    /// Local search over independent sets (`kappa = 2(1 + epsilon)`).
    LocalSearch(LocalSearchParams<F>),
    /// Greedy over bases (`kappa = 2`).
    GreedyBases,
}

impl<F: Scalar> InnerSolver<F> {
    pub fn mode(&self) -> ConstraintMode {
        match self {
            InnerSolver::LocalSearch(_) => ConstraintMode::IndependentSets,
            InnerSolver::GreedyBases => ConstraintMode::Bases,
        }
    }

    /// The approximation factor this solver guarantees on the bonus part.
    pub fn kappa(&self) -> F {
        match self {
            InnerSolver::LocalSearch(p) => F::from_f64_c(2.0) * (F::one() + p.epsilon),
            InnerSolver::GreedyBases => F::from_f64_c(2.0),
        }
    }

    fn solve(&self, m: &Matroid, obj: &SplitObjective<F>) -> Result<ActionSet> {
        match self {
            InnerSolver::LocalSearch(p) => Ok(local_search(m, obj, p)?.set),
            InnerSolver::GreedyBases => Ok(greedy_bases(m, obj)?.set),
        }
    }
}

/// Evaluates the Lagrangian `L1 - F1 - lambda (L2 + F2)`, or with
/// `kappa_mode` the approximation Lagrangian that scales both bonuses by
/// `kappa`.
///
/// Sets containing arms with an unbounded bonus evaluate to negative
/// infinity (the cost lower bound is vacuous there); the result is never NaN.
pub fn lagrangian<F: Scalar>(
    inst: &RatioInstance<F>,
    lambda: F,
    a: &ActionSet,
    kappa_mode: bool,
) -> Result<F> {
    if lambda < F::zero() {
        return Err(Error::invalid("lambda must be nonnegative"));
    }
    let k = if kappa_mode { inst.kappa } else { F::one() };
    let f1 = inst.cost_bonus.eval(a)?;
    if f1.unexplored > 0 {
        return Ok(F::neg_infinity());
    }
    let mut out = inst.cost.eval(a) - k * f1.value;
    if lambda > F::zero() {
        let f2 = inst.reward_bonus.eval(a)?;
        if f2.unexplored > 0 {
            return Ok(F::neg_infinity());
        }
        out = out - lambda * (inst.reward.eval(a) + k * f2.value);
    }
    Ok(out)
}

/// Output of the ratio binary search.
#[derive(Clone, Debug)]
pub struct RatioOutcome<F> {
    pub set: ActionSet,
    /// Verified lower bound on the optimal ratio.
    pub lambda_lower: F,
    /// Upper bound reached when the search stopped.
    pub lambda_upper: F,
    /// Bisection iterations performed.
    pub iterations: u64,
    /// Stopping tolerance derived from the instance.
    pub delta: F,
}

/// Binary search for (approximately) minimizing `(L1 - F1)^+ / (L2 + F2)`.
///
/// The output `A` satisfies
/// `(L1(A) - (kappa + eta) F1(A))^+ / (L2(A) + kappa F2(A)) <= lambda*`,
/// the optimal ratio over the solver's constraint family.
///
/// All bonus evaluations encountered must be finite: with unexplored arms in
/// play the ratio degenerates and callers are expected to explore first.
pub fn ratio_binary_search<F: Scalar>(
    m: &Matroid,
    inst: &RatioInstance<F>,
    inner: &InnerSolver<F>,
) -> Result<RatioOutcome<F>> {
    let n = m.ground_size();
    if inst.cost.weights.len() != n || inst.reward.weights.len() != n {
        return Err(Error::invalid(
            "instance weights do not match the ground set",
        ));
    }
    if m.rank() == 0 {
        return Err(Error::Infeasible(
            "the constraint family contains no nonempty set".into(),
        ));
    }
    let kappa = inst.kappa;

    // Smallest positive singleton cost bonus: the granularity of the ratio.
    let mut min_f1 = F::infinity();
    for x in 0..n {
        let single = ActionSet::from_indices(n, &[x])?;
        if !m.is_independent(&single)? {
            continue;
        }
        let f1 = inst.cost_bonus.eval(&single)?;
        if f1.unexplored > 0 {
            continue; // unbounded bonus, never the minimum
        }
        if f1.value <= F::zero() {
            return Err(Error::invalid(format!(
                "cost bonus must be positive on feasible singletons, F1({{{x}}}) = {}",
                f1.value
            )));
        }
        min_f1 = min_f1.min(f1.value);
    }
    if !min_f1.is_finite() {
        return Err(Error::Numerical {
            context: "ratio_binary_search",
            details: "every feasible singleton has an unbounded cost bonus; explore first".into(),
        });
    }

    // Denominator bound from the reward-maximizing set.
    let scaled_reward_bonus = WeightedSum::new(vec![(kappa, inst.reward_bonus)])?;
    let reward_obj = SplitObjective::new(
        LinearFn::from_weights(inst.reward.weights.clone()),
        &scaled_reward_bonus,
        true,
    );
    let b = inner.solve(m, &reward_obj)?;
    let f2b = inst.reward_bonus.eval(&b)?;
    if f2b.unexplored > 0 {
        return Err(Error::Numerical {
            context: "ratio_binary_search",
            details: "reward bonus is unbounded on the reward maximizer; explore first".into(),
        });
    }
    let denom = inst.reward.eval(&b) + kappa * kappa * f2b.value;
    let delta = inst.eta * min_f1 / denom;
    if delta.is_nan() || delta <= F::zero() || !delta.is_finite() {
        return Err(Error::Numerical {
            context: "ratio_binary_search",
            details: format!("degenerate stopping tolerance delta = {delta}"),
        });
    }

    // Start from the plain greedy reward maximizer.
    let mut a = m.linear_max_greedy(&inst.reward.weights, inner.mode())?;
    debug_assert!(!a.is_empty());
    if lagrangian(inst, F::zero(), &a, true)? <= F::zero() {
        return Ok(RatioOutcome {
            set: a,
            lambda_lower: F::zero(),
            lambda_upper: F::zero(),
            iterations: 0,
            delta,
        });
    }

    let f1a = inst.cost_bonus.eval(&a)?.value;
    let f2a = inst.reward_bonus.eval(&a)?;
    if f2a.unexplored > 0 {
        return Err(Error::Numerical {
            context: "ratio_binary_search",
            details: "reward bonus is unbounded on the initial set; explore first".into(),
        });
    }
    let mut lambda_lo = F::zero();
    let mut lambda_hi = (inst.cost.eval(&a) - f1a) / (inst.reward.eval(&a) + f2a.value);
    let mut iterations = 0u64;
    while lambda_hi - lambda_lo >= delta {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Numerical {
                context: "ratio_binary_search",
                details: format!(
                    "bisection stalled: bracket [{lambda_lo}, {lambda_hi}], delta {delta}"
                ),
            });
        }
        let lambda = (lambda_lo + lambda_hi) * F::from_f64_c(0.5);
        // Maximize -L(lambda, .) = (lambda L2 - L1) + (F1 + lambda F2).
        // The entry price only shifts values, so the solver sees the
        // normalized linear part; sign tests use the full Lagrangian.
        let weights: Vec<F> = (0..n)
            .map(|i| lambda * inst.reward.weights[i] - inst.cost.weights[i])
            .collect();
        let bonus = WeightedSum::new(vec![
            (F::one(), inst.cost_bonus),
            (lambda, inst.reward_bonus),
        ])?;
        let obj = SplitObjective::new(LinearFn::from_weights(weights), &bonus, true);
        let s = inner.solve(m, &obj)?;
        if lagrangian(inst, lambda, &s, true)? >= F::zero() {
            lambda_lo = lambda;
        } else {
            lambda_hi = lambda;
            a = s;
        }
    }
    Ok(RatioOutcome {
        set: a,
        lambda_lower: lambda_lo,
        lambda_upper: lambda_hi,
        iterations,
        delta,
    })
}

/// Exhaustive minimization of `(L1 - F1)^+ / (L2 + F2)` over nonempty
/// feasible sets. Test oracle, guarded to `n <= 16`.
pub fn brute_force_ratio<F: Scalar>(
    m: &Matroid,
    inst: &RatioInstance<F>,
    mode: ConstraintMode,
) -> Result<(ActionSet, F)> {
    const LIMIT: usize = 16;
    if m.ground_size() > LIMIT {
        return Err(Error::Capacity {
            what: "ratio enumeration",
            limit: LIMIT,
            actual: m.ground_size(),
        });
    }
    let mut best: Option<(ActionSet, F)> = None;
    for a in m.enumerate_feasible(mode)? {
        if a.is_empty() {
            continue;
        }
        let ratio = exact_ratio(inst, &a)?;
        let better = match &best {
            None => true,
            Some((bs, bv)) => ratio < *bv || (ratio == *bv && a < *bs),
        };
        if better {
            best = Some((a, ratio));
        }
    }
    best.ok_or_else(|| Error::Infeasible("no nonempty feasible set".into()))
}

/// `(L1 - F1)^+ / (L2 + F2)` of one set.
pub fn exact_ratio<F: Scalar>(inst: &RatioInstance<F>, a: &ActionSet) -> Result<F> {
    let f1 = inst.cost_bonus.eval(a)?;
    let num = if f1.unexplored > 0 {
        F::zero()
    } else {
        (inst.cost.eval(a) - f1.value).max(F::zero())
    };
    if num == F::zero() {
        return Ok(F::zero());
    }
    let f2 = inst.reward_bonus.eval(a)?;
    if f2.unexplored > 0 {
        return Ok(F::zero());
    }
    let den = inst.reward.eval(a) + f2.value;
    if den.is_nan() || den <= F::zero() {
        return Err(Error::invalid(
            "the reward side must be positive on nonempty sets",
        ));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximize::SqrtLinear;

    fn sqrt_fn(weights: &[f64]) -> SqrtLinear<f64> {
        SqrtLinear::new(weights.to_vec()).unwrap()
    }

    #[test]
    fn lagrangian_hand_instance() {
        // L1({0}) = 3, F1({0}) = 1, L2({0}) = 2, F2({0}) = 1.
        let f1 = sqrt_fn(&[1.0]);
        let f2 = sqrt_fn(&[1.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![3.0]),
            &f1,
            LinearFn::from_weights(vec![2.0]),
            &f2,
            2.0,
            0.1,
        )
        .unwrap();
        let a = ActionSet::from_indices(1, &[0]).unwrap();
        let plain = lagrangian(&inst, 0.5, &a, false).unwrap();
        assert!((plain - (3.0 - 1.0 - 0.5 * 3.0)).abs() < 1e-12);
        assert!((plain - 0.5).abs() < 1e-12);
        let approx = lagrangian(&inst, 0.5, &a, true).unwrap();
        assert!((approx - (3.0 - 2.0 - 0.5 * 4.0)).abs() < 1e-12);
        assert!((approx + 1.0).abs() < 1e-12);
        // kappa >= 1 never raises the approximation Lagrangian.
        assert!(approx <= plain);
    }

    #[test]
    fn lagrangian_trivial_cases() {
        let f1 = sqrt_fn(&[1.0]);
        let f2 = sqrt_fn(&[1.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![3.0]),
            &f1,
            LinearFn::from_weights(vec![2.0]),
            &f2,
            1.0,
            0.1,
        )
        .unwrap();
        let a = ActionSet::from_indices(1, &[0]).unwrap();
        // At lambda = 0 and kappa = 1 the two variants coincide.
        assert_eq!(
            lagrangian(&inst, 0.0, &a, false).unwrap(),
            lagrangian(&inst, 0.0, &a, true).unwrap()
        );
        // Empty set with normalized L1: identically zero.
        let empty = ActionSet::empty(1);
        for lambda in [0.0, 0.5, 3.0] {
            assert_eq!(lagrangian(&inst, lambda, &empty, false).unwrap(), 0.0);
        }
        assert!(lagrangian(&inst, -1.0, &a, false).is_err());
    }

    #[test]
    fn early_return_when_cost_already_covered() {
        // L1(A0) <= kappa F1(A0): the reward maximizer is already ratio-free.
        let m = Matroid::uniform(2, 1).unwrap();
        let f1 = sqrt_fn(&[4.0, 4.0]);
        let f2 = sqrt_fn(&[1.0, 1.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![1.0, 1.0]),
            &f1,
            LinearFn::from_weights(vec![5.0, 1.0]),
            &f2,
            2.0,
            0.1,
        )
        .unwrap();
        let out = ratio_binary_search(&m, &inst, &InnerSolver::GreedyBases).unwrap();
        assert_eq!(out.set.indices(), vec![0]); // the L2 maximizer
        assert_eq!(out.iterations, 0);
        assert_eq!(out.lambda_upper, 0.0);
    }

    #[test]
    fn singleton_family_meets_guarantee() {
        // Bases of uniform k=1 on n=3: the three singletons.
        let m = Matroid::uniform(3, 1).unwrap();
        let f1 = sqrt_fn(&[0.01, 0.04, 0.09]);
        let f2 = sqrt_fn(&[0.04, 0.01, 0.01]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![3.0, 1.5, 2.0]),
            &f1,
            LinearFn::from_weights(vec![1.0, 0.8, 2.5]),
            &f2,
            2.0,
            0.1,
        )
        .unwrap();
        let (opt_set, lambda_star) = brute_force_ratio(&m, &inst, ConstraintMode::Bases).unwrap();
        // Exhaustive check of the exhaustive oracle.
        let mut best = f64::INFINITY;
        for i in 0..3 {
            let a = ActionSet::from_indices(3, &[i]).unwrap();
            best = best.min(exact_ratio(&inst, &a).unwrap());
        }
        assert_eq!(lambda_star, best);
        assert!(!opt_set.is_empty());

        let out = ratio_binary_search(&m, &inst, &InnerSolver::GreedyBases).unwrap();
        let a = &out.set;
        let f1a = f1.eval(a).unwrap().value;
        let f2a = f2.eval(a).unwrap().value;
        let kappa = 2.0;
        let eta = 0.1;
        let lhs = ((inst.cost.eval(a) - (kappa + eta) * f1a).max(0.0))
            / (inst.reward.eval(a) + kappa * f2a);
        assert!(lhs <= lambda_star + 1e-7);
    }

    #[test]
    fn brute_force_clamps_at_zero() {
        // L1 <= F1 somewhere: the optimal ratio is exactly zero.
        let m = Matroid::uniform(2, 1).unwrap();
        let f1 = sqrt_fn(&[9.0, 0.01]);
        let f2 = sqrt_fn(&[1.0, 1.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![2.0, 5.0]),
            &f1,
            LinearFn::from_weights(vec![1.0, 1.0]),
            &f2,
            1.0,
            0.1,
        )
        .unwrap();
        let (set, lambda) = brute_force_ratio(&m, &inst, ConstraintMode::Bases).unwrap();
        assert_eq!(lambda, 0.0);
        assert_eq!(set.indices(), vec![0]);
    }

    #[test]
    fn brute_force_single_arm() {
        let m = Matroid::uniform(1, 1).unwrap();
        let f1 = sqrt_fn(&[1.0]);
        let f2 = sqrt_fn(&[4.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![5.0]),
            &f1,
            LinearFn::from_weights(vec![1.0]),
            &f2,
            1.0,
            0.1,
        )
        .unwrap();
        let (_, lambda) = brute_force_ratio(&m, &inst, ConstraintMode::Bases).unwrap();
        assert!((lambda - (5.0 - 1.0) / (1.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_when_rank_zero() {
        let m = Matroid::uniform(2, 0).unwrap();
        let f1 = sqrt_fn(&[1.0, 1.0]);
        let f2 = sqrt_fn(&[1.0, 1.0]);
        let inst = RatioInstance::new(
            LinearFn::from_weights(vec![1.0, 1.0]),
            &f1,
            LinearFn::from_weights(vec![1.0, 1.0]),
            &f2,
            2.0,
            0.1,
        )
        .unwrap();
        assert!(matches!(
            ratio_binary_search(&m, &inst, &InnerSolver::GreedyBases),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn instance_validation() {
        let f = sqrt_fn(&[1.0]);
        assert!(RatioInstance::new(
            LinearFn::from_weights(vec![1.0]),
            &f,
            LinearFn::from_weights(vec![1.0]),
            &f,
            0.5, // kappa < 1
            0.1,
        )
        .is_err());
        assert!(RatioInstance::new(
            LinearFn::from_weights(vec![1.0]),
            &f,
            LinearFn::new(vec![1.0], 1.0), // reward not normalized
            &f,
            2.0,
            0.1,
        )
        .is_err());
        assert!(RatioInstance::new(
            LinearFn::new(vec![1.0], -1.0), // negative entry price
            &f,
            LinearFn::from_weights(vec![1.0]),
            &f,
            2.0,
            0.1,
        )
        .is_err());
    }
}
