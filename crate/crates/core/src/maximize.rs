//! Approximate maximization of `L + F` over matroid constraints, where `L`
//! is linear and `F` is a normalized nondecreasing submodular set function.
//!
//! Two routines with different constraint families and guarantees:
//!
//! * [`local_search`] on independent sets: starts from the greedy linear
//!   maximizer and applies delete/add/swap moves whose improvement clears a
//!   threshold proportional to `F` of the current set. The output `S`
//!   satisfies `L(S) + 2(1+eps) F(S) >= L(O) + F(O)` for every independent
//!   `O`.
//! * [`greedy_bases`] on bases: plain greedy extension for `rank` steps;
//!   the output satisfies `L(S) + 2 F(S) >= L(O) + F(O)` for every basis.
//!
//! [`brute_force_max`] is the exhaustive oracle used by tests.

use crate::action::ActionSet;
use crate::bonus::{BonusValue, SetFunction};
use crate::error::{Error, Result};
use crate::matroid::{ConstraintMode, Matroid};
use crate::scalar::Scalar;

/// A linear set function `a -> offset + sum of weights over a`.
#[derive(Clone, Debug)]
pub struct LinearFn<F> {
    pub weights: Vec<F>,
    pub offset: F,
}

impl<F: Scalar> LinearFn<F> {
    pub fn new(weights: Vec<F>, offset: F) -> Self {
        LinearFn { weights, offset }
    }

    /// Normalized linear function (zero offset).
    pub fn from_weights(weights: Vec<F>) -> Self {
        LinearFn {
            weights,
            offset: F::zero(),
        }
    }

    pub fn eval(&self, a: &ActionSet) -> F {
        self.offset + a.iter().map(|i| self.weights[i]).sum()
    }
}

/// The split objective `L + F` handed to the maximizers.
pub struct SplitObjective<'a, F: Scalar> {
    pub linear: LinearFn<F>,
    pub bonus: &'a dyn SetFunction<F>,
    /// Claim that `F(A) > 0` for every nonempty `A`; local search validates
    /// it on the singletons before relying on its threshold rule.
    pub positive: bool,
}

impl<'a, F: Scalar> SplitObjective<'a, F> {
    pub fn new(linear: LinearFn<F>, bonus: &'a dyn SetFunction<F>, positive: bool) -> Self {
        SplitObjective {
            linear,
            bonus,
            positive,
        }
    }

    /// `(L + F)(a)` with the lexicographic unexplored convention.
    pub fn value(&self, a: &ActionSet) -> Result<BonusValue<F>> {
        Ok(self.bonus.eval(a)?.plus(self.linear.eval(a)))
    }
}

/// Tuning knobs for [`local_search`].
#[derive(Clone, Copy, Debug)]
pub struct LocalSearchParams<F> {
    /// Significance threshold: only improvements larger than
    /// `epsilon / rank * F(S)` are taken. Must be positive.
    pub epsilon: F,
    /// Safety cap on accepted moves; `None` derives a generous bound from
    /// the singleton bonus spread.
    pub max_iterations: Option<u64>,
}

impl<F: Scalar> LocalSearchParams<F> {
    pub fn new(epsilon: F) -> Self {
        LocalSearchParams {
            epsilon,
            max_iterations: None,
        }
    }
}

/// Result of a maximization routine.
#[derive(Clone, Debug)]
pub struct MaximizeOutcome<F> {
    pub set: ActionSet,
    /// `(L + F)` of the output set.
    pub value: BonusValue<F>,
    /// Accepted moves (local search), greedy steps, or enumerated sets.
    pub iterations: u64,
}

/// Local search for `L + F` over the independent sets.
pub fn local_search<F: Scalar>(
    m: &Matroid,
    obj: &SplitObjective<F>,
    params: &LocalSearchParams<F>,
) -> Result<MaximizeOutcome<F>> {
    let n = m.ground_size();
    if obj.linear.weights.len() != n {
        return Err(Error::invalid(
            "objective weights do not match the ground set",
        ));
    }
    if params.epsilon.is_nan() || params.epsilon <= F::zero() {
        return Err(Error::invalid("local search requires epsilon > 0"));
    }
    if params.max_iterations == Some(0) {
        return Err(Error::invalid("max_iterations must be at least 1"));
    }
    let rank = m.rank();
    let empty_outcome = |set: ActionSet, obj: &SplitObjective<F>| -> Result<MaximizeOutcome<F>> {
        let value = obj.value(&set)?;
        Ok(MaximizeOutcome {
            set,
            value,
            iterations: 0,
        })
    };
    if rank == 0 {
        return empty_outcome(ActionSet::empty(n), obj);
    }

    // Independent singletons and their bonus values, reused for the
    // positivity check, the empty-start seed, and the iteration cap.
    let mut singletons: Vec<(usize, BonusValue<F>)> = Vec::new();
    for x in 0..n {
        let single = ActionSet::from_indices(n, &[x])?;
        if m.is_independent(&single)? {
            singletons.push((x, obj.bonus.eval(&single)?));
        }
    }
    if obj.positive {
        if let Some((x, _)) = singletons.iter().find(|(_, b)| !b.is_positive()) {
            return Err(Error::invalid(format!(
                "objective claims a positive bonus but F({{{x}}}) is not positive"
            )));
        }
    }

    let mut s = m.linear_max_greedy(&obj.linear.weights, ConstraintMode::IndependentSets)?;
    if s.is_empty() {
        // Seed with the best-linear singleton whose total value is positive.
        let mut seed: Option<(usize, F)> = None;
        for &(x, _) in &singletons {
            if obj.value(&ActionSet::from_indices(n, &[x])?)?.is_positive() {
                let lx = obj.linear.eval(&ActionSet::from_indices(n, &[x])?);
                if seed.is_none_or(|(_, best)| lx > best) {
                    seed = Some((x, lx));
                }
            }
        }
        match seed {
            Some((x, _)) => s.insert(x),
            None => return empty_outcome(s, obj),
        }
    }

    let cap = params
        .max_iterations
        .unwrap_or_else(|| default_iteration_cap(rank, params.epsilon, &singletons));

    let m_f = F::from_size(rank);
    let mut iterations = 0u64;
    loop {
        let fs = obj.bonus.eval(&s)?;
        let margin = params.epsilon / m_f * fs.value;
        let cur = obj.value(&s)?;

        let next = find_improving_move(m, obj, &s, &cur, margin)?;
        let Some(next) = next else { break };
        debug_assert!(
            obj.value(&next)?.exceeds(&cur),
            "accepted move must improve"
        );
        s = next;
        iterations += 1;
        if iterations > cap {
            return Err(Error::Numerical {
                context: "local_search",
                details: format!(
                    "no convergence within {cap} accepted moves; the threshold may be misconfigured"
                ),
            });
        }
    }
    let value = obj.value(&s)?;
    Ok(MaximizeOutcome {
        set: s,
        value,
        iterations,
    })
}

/// First improving delete, add, or swap, scanned in that order.
fn find_improving_move<F: Scalar>(
    m: &Matroid,
    obj: &SplitObjective<F>,
    s: &ActionSet,
    cur: &BonusValue<F>,
    margin: F,
) -> Result<Option<ActionSet>> {
    let n = m.ground_size();
    for x in s.iter() {
        let cand = s.without(x);
        if obj.value(&cand)?.exceeds_with_margin(cur, margin) {
            return Ok(Some(cand));
        }
    }
    for y in 0..n {
        if s.contains(y) {
            continue;
        }
        let cand = s.with(y);
        if m.is_independent(&cand)? && obj.value(&cand)?.exceeds_with_margin(cur, margin) {
            return Ok(Some(cand));
        }
    }
    for x in s.iter() {
        for y in 0..n {
            if s.contains(y) {
                continue;
            }
            let cand = s.without(x).with(y);
            if m.is_independent(&cand)? && obj.value(&cand)?.exceeds_with_margin(cur, margin) {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Safety cap mirroring the search's complexity bound: the spread of the
/// singleton bonuses bounds how far `F` can climb from its starting value.
fn default_iteration_cap<F: Scalar>(
    rank: usize,
    epsilon: F,
    singletons: &[(usize, BonusValue<F>)],
) -> u64 {
    let m_f = F::from_size(rank);
    let positives: Vec<F> = singletons
        .iter()
        .map(|(_, b)| b.value)
        .filter(|v| *v > F::zero())
        .collect();
    let ratio = if positives.is_empty() {
        F::from_f64_c(1e6)
    } else {
        let max = positives.iter().copied().fold(F::zero(), F::max);
        let min = positives.iter().copied().fold(F::infinity(), F::min);
        (m_f * max / min).max(F::from_f64_c(2.0))
    };
    let per_tier = (m_f * ratio.ln() / (F::one() + epsilon / m_f).ln()).ceil();
    let per_tier = per_tier.to_u64().unwrap_or(u64::MAX / 4);
    // One budget per unexplored tier the search can climb through.
    ((rank as u64 + 1) * per_tier + 10).max(1000)
}

/// Greedy maximization of `L + F` over the bases: `rank` extensions, each
/// adding the feasible element with the best total value, ties to the
/// lowest index. `F` need not be positive here.
pub fn greedy_bases<F: Scalar>(m: &Matroid, obj: &SplitObjective<F>) -> Result<MaximizeOutcome<F>> {
    let n = m.ground_size();
    if obj.linear.weights.len() != n {
        return Err(Error::invalid(
            "objective weights do not match the ground set",
        ));
    }
    let mut s = ActionSet::empty(n);
    let mut iterations = 0u64;
    for _ in 0..m.rank() {
        let mut best: Option<(usize, BonusValue<F>)> = None;
        for y in 0..n {
            if s.contains(y) {
                continue;
            }
            let cand = s.with(y);
            if !m.is_independent(&cand)? {
                continue;
            }
            let v = obj.value(&cand)?;
            if best.as_ref().is_none_or(|(_, bv)| v.exceeds(bv)) {
                best = Some((y, v));
            }
        }
        // The exchange axiom guarantees an extension below full rank.
        let Some((y, _)) = best else { break };
        s.insert(y);
        iterations += 1;
    }
    let value = obj.value(&s)?;
    Ok(MaximizeOutcome {
        set: s,
        value,
        iterations,
    })
}

/// Exhaustive maximization of `L + F` over the feasible family. Ties go to
/// the set with the numerically smallest bit pattern.
pub fn brute_force_max<F: Scalar>(
    m: &Matroid,
    obj: &SplitObjective<F>,
    mode: ConstraintMode,
) -> Result<MaximizeOutcome<F>> {
    let feasible = m.enumerate_feasible(mode)?;
    let mut best: Option<(ActionSet, BonusValue<F>)> = None;
    let iterations = feasible.len() as u64;
    for a in feasible {
        let v = obj.value(&a)?;
        let better = match &best {
            None => true,
            Some((bs, bv)) => match v.lex_cmp(bv) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => a < *bs,
                std::cmp::Ordering::Less => false,
            },
        };
        if better {
            best = Some((a, v));
        }
    }
    let (set, value) = best.expect("feasible family is never empty");
    Ok(MaximizeOutcome {
        set,
        value,
        iterations,
    })
}

/// The zero set function.
pub struct ZeroBonus;

impl<F: Scalar> SetFunction<F> for ZeroBonus {
    fn eval(&self, _a: &ActionSet) -> Result<BonusValue<F>> {
        Ok(BonusValue::zero())
    }
}

/// `F(A)` = square root of the summed weights of `A` — the canonical
/// normalized nondecreasing submodular function with a split-friendly shape.
/// Weights must be nonnegative.
pub struct SqrtLinear<F> {
    weights: Vec<F>,
}

impl<F: Scalar> SqrtLinear<F> {
    pub fn new(weights: Vec<F>) -> Result<Self> {
        if weights.iter().any(|w| w.is_nan() || *w < F::zero()) {
            return Err(Error::invalid("sqrt-linear weights must be nonnegative"));
        }
        Ok(SqrtLinear { weights })
    }
}

impl<F: Scalar> SetFunction<F> for SqrtLinear<F> {
    fn eval(&self, a: &ActionSet) -> Result<BonusValue<F>> {
        if a.ground_size() != self.weights.len() {
            return Err(Error::invalid("action and weight lengths differ"));
        }
        let sum: F = a.iter().map(|i| self.weights[i]).sum();
        Ok(BonusValue::finite(sum.sqrt()))
    }
}

/// A nonnegative combination of set functions; unexplored tiers add up.
pub struct WeightedSum<'a, F> {
    terms: Vec<(F, &'a dyn SetFunction<F>)>,
}

impl<'a, F: Scalar> WeightedSum<'a, F> {
    pub fn new(terms: Vec<(F, &'a dyn SetFunction<F>)>) -> Result<Self> {
        if terms.iter().any(|(c, _)| c.is_nan() || *c < F::zero()) {
            return Err(Error::invalid(
                "set-function coefficients must be nonnegative",
            ));
        }
        Ok(WeightedSum { terms })
    }
}

impl<F: Scalar> SetFunction<F> for WeightedSum<'_, F> {
    fn eval(&self, a: &ActionSet) -> Result<BonusValue<F>> {
        let mut out = BonusValue::zero();
        for (c, f) in &self.terms {
            if *c == F::zero() {
                continue;
            }
            let v = f.eval(a)?;
            out.unexplored += v.unexplored;
            out.value = out.value + *c * v.value;
        }
        Ok(out)
    }
}

/// A set function plus a nonnegative modular term, used to restore strict
/// positivity of bounded-radius bonuses.
pub struct ModularBoost<'a, F> {
    inner: &'a dyn SetFunction<F>,
    boost: Vec<F>,
}

impl<'a, F: Scalar> ModularBoost<'a, F> {
    pub fn new(inner: &'a dyn SetFunction<F>, boost: Vec<F>) -> Result<Self> {
        if boost.iter().any(|b| b.is_nan() || *b < F::zero()) {
            return Err(Error::invalid("modular boost terms must be nonnegative"));
        }
        Ok(ModularBoost { inner, boost })
    }
}

impl<F: Scalar> SetFunction<F> for ModularBoost<'_, F> {
    fn eval(&self, a: &ActionSet) -> Result<BonusValue<F>> {
        let v = self.inner.eval(a)?;
        let extra: F = a.iter().map(|i| self.boost[i]).sum();
        Ok(v.plus(extra))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bonus::{ArmStats, BonusFamily, BonusSpec, ConfidenceBonus, NormOrder, ScaleFn};

    fn uniform(n: usize, k: usize) -> Matroid {
        Matroid::uniform(n, k).unwrap()
    }

    #[test]
    fn local_search_zero_bonus_returns_linear_optimum() {
        let m = uniform(3, 2);
        let obj = SplitObjective::new(
            LinearFn::from_weights(vec![3.0, -1.0, 2.0]),
            &ZeroBonus,
            false,
        );
        let out = local_search(&m, &obj, &LocalSearchParams::new(0.1)).unwrap();
        assert_eq!(out.set.indices(), vec![0, 2]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn local_search_all_negative_outputs_empty() {
        let m = uniform(2, 2);
        let obj = SplitObjective::new(LinearFn::from_weights(vec![-1.0, -2.0]), &ZeroBonus, false);
        let out = local_search(&m, &obj, &LocalSearchParams::new(0.1)).unwrap();
        assert!(out.set.is_empty());
    }

    #[test]
    fn local_search_meets_guarantee_on_sqrt_instance() {
        let m = uniform(3, 2);
        let f = SqrtLinear::new(vec![1.0, 1.0, 4.0]).unwrap();
        let obj = SplitObjective::new(LinearFn::from_weights(vec![0.0; 3]), &f, true);
        let out = local_search(&m, &obj, &LocalSearchParams::new(0.1)).unwrap();

        let brute = brute_force_max(&m, &obj, ConstraintMode::IndependentSets).unwrap();
        assert_eq!(brute.set.indices(), vec![0, 2]); // tie with {1,2}, lower pattern wins
        assert!((brute.value.value - 5.0f64.sqrt()).abs() < 1e-12);

        let fs = f.eval(&out.set).unwrap().value;
        assert!(2.0 * 1.1 * fs + 1e-9 >= brute.value.value);
        assert!(m.is_independent(&out.set).unwrap());
    }

    #[test]
    fn local_search_iteration_cap_errors() {
        let m = uniform(3, 3);
        let f = SqrtLinear::new(vec![1.0, 1.0, 1.0]).unwrap();
        // Slightly negative weights force the singleton seed and two adds.
        let obj = SplitObjective::new(LinearFn::from_weights(vec![-1e-3, -1e-3, -1e-3]), &f, true);
        let mut params = LocalSearchParams::new(0.1);
        params.max_iterations = Some(1);
        assert!(matches!(
            local_search(&m, &obj, &params),
            Err(Error::Numerical { .. })
        ));
        params.max_iterations = Some(10);
        let out = local_search(&m, &obj, &params).unwrap();
        assert_eq!(out.set.indices(), vec![0, 1, 2]);
    }

    #[test]
    fn greedy_rank_one_picks_best_singleton() {
        let m = uniform(3, 1);
        let f = SqrtLinear::new(vec![1.0, 9.0, 4.0]).unwrap();
        let obj = SplitObjective::new(LinearFn::from_weights(vec![0.5, 0.0, 0.0]), &f, false);
        let out = greedy_bases(&m, &obj).unwrap();
        assert_eq!(out.set.indices(), vec![1]); // 3.0 beats 1.5 and 2.0
    }

    #[test]
    fn greedy_meets_guarantee_on_triangle() {
        let m = Matroid::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let f = SqrtLinear::new(vec![4.0, 1.0, 1.0]).unwrap();
        let obj = SplitObjective::new(LinearFn::from_weights(vec![0.0; 3]), &f, false);
        let out = greedy_bases(&m, &obj).unwrap();
        assert_eq!(out.set.len(), m.rank());
        let brute = brute_force_max(&m, &obj, ConstraintMode::Bases).unwrap();
        let fs = f.eval(&out.set).unwrap().value;
        assert!(2.0 * fs + 1e-9 >= brute.value.value);
    }

    #[test]
    fn greedy_with_zero_bonus_matches_linear_greedy() {
        let m = uniform(3, 2);
        let obj = SplitObjective::new(
            LinearFn::from_weights(vec![3.0, 1.0, 2.0]),
            &ZeroBonus,
            false,
        );
        let out = greedy_bases(&m, &obj).unwrap();
        let linear = m
            .linear_max_greedy(&[3.0, 1.0, 2.0], ConstraintMode::Bases)
            .unwrap();
        assert_eq!(out.set.indices(), linear.indices());
        assert_eq!(out.set.indices(), vec![0, 2]);
    }

    #[test]
    fn brute_force_singleton_instances() {
        let m = uniform(1, 1);
        let obj = SplitObjective::new(LinearFn::from_weights(vec![-2.0]), &ZeroBonus, false);
        let out = brute_force_max(&m, &obj, ConstraintMode::IndependentSets).unwrap();
        assert!(out.set.is_empty());
        assert_eq!(out.iterations, 2);
    }

    #[test]
    fn brute_force_without_bonus_agrees_with_linear_greedy() {
        let m = uniform(3, 2);
        let weights = vec![3.0, -1.0, 2.0];
        let obj = SplitObjective::new(LinearFn::from_weights(weights.clone()), &ZeroBonus, false);
        for mode in [ConstraintMode::IndependentSets, ConstraintMode::Bases] {
            let brute = brute_force_max(&m, &obj, mode).unwrap();
            let linear = m.linear_max_greedy(&weights, mode).unwrap();
            let brute_val: f64 = brute.set.iter().map(|i| weights[i]).sum();
            let linear_val: f64 = linear.iter().map(|i| weights[i]).sum();
            assert_eq!(brute_val, linear_val);
        }
    }

    #[test]
    fn local_search_prefers_unexplored_arms() {
        let m = uniform(3, 2);
        let spec = BonusSpec::new(
            NormOrder::One,
            BonusFamily::QuadraticEscb,
            f64::INFINITY,
            ScaleFn::Const { c: 2.0 },
            2,
        )
        .unwrap();
        let stats = ArmStats::from_state(5, vec![2, 2, 0], vec![1.0, 0.9, 0.0]).unwrap();
        let bonus = ConfidenceBonus {
            spec: &spec,
            stats: &stats,
        };
        let obj = SplitObjective::new(LinearFn::from_weights(stats.means().to_vec()), &bonus, true);
        let out = local_search(&m, &obj, &LocalSearchParams::new(0.1)).unwrap();
        assert!(out.set.contains(2), "unexplored arm must be covered");
        assert_eq!(out.value.unexplored, 1);
    }

    #[test]
    fn weighted_sum_and_boost() {
        let f1 = SqrtLinear::new(vec![1.0, 4.0]).unwrap();
        let f2 = SqrtLinear::new(vec![9.0, 0.0]).unwrap();
        let sum = WeightedSum::new(vec![(1.0, &f1 as _), (2.0, &f2 as _)]).unwrap();
        let a = ActionSet::from_indices(2, &[0]).unwrap();
        let v: BonusValue<f64> = sum.eval(&a).unwrap();
        assert!((v.value - (1.0 + 2.0 * 3.0)).abs() < 1e-12);

        let boosted = ModularBoost::new(&f1, vec![0.25, 0.0]).unwrap();
        let b: BonusValue<f64> = boosted.eval(&a).unwrap();
        assert!((b.value - 1.25).abs() < 1e-12);
        assert!(WeightedSum::new(vec![(-1.0, &f1 as _)]).is_err());
    }
}
