//! Confidence-region statistics and exploration bonuses.
//!
//! A confidence region around the empirical means is parametrized by a norm
//! order `p`, a radius `r`, an exploration scale `f(t)`, and per-arm gauge
//! functions determined by the bonus family. The exploration bonus of an
//! action is the largest total optimistic deviation consistent with the
//! region: a per-arm width sum for `p = inf`, and for `p = 1` a coupled
//! maximization solved in closed form (quadratic gauges, infinite radius) or
//! by bisection on the dual variable otherwise.
//!
//! Arms with no observations have a degenerate gauge, so their deviation is
//! unbounded when `r = inf`. Rather than propagating floating-point
//! infinities through the optimizers, bonuses carry an explicit count of
//! unexplored arms and compare lexicographically on (count, value).

use std::cmp::Ordering;

use crate::action::ActionSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Norm order of the confidence region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormOrder {
    One,
    Infinity,
}

/// Shape of the per-arm gauge functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BonusFamily {
    /// `g(d) = N d^2 / f(t)` — the width sums of CUCB.
    QuadraticCucb,
    /// `g(d) = 2 N d^2 / f(t)` — the ESCB ellipsoid.
    QuadraticEscb,
    /// Bernoulli KL gauge on rewards rescaled from `[-1,1]` to `[0,1]`.
    Kl,
}

/// Exploration scale `f(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleFn<F> {
    /// `f(t) = c (ln t + m)`.
    LogPlusM { c: F },
    /// `f(t) = c ln t`.
    CLog { c: F },
    /// Constant scale, mainly for tests and bonus-free baselines.
    Const { c: F },
}

/// Parameters of a confidence-region family.
#[derive(Clone, Debug)]
pub struct BonusSpec<F> {
    p: NormOrder,
    family: BonusFamily,
    r: F,
    scale: ScaleFn<F>,
    m: usize,
}

impl<F: Scalar> BonusSpec<F> {
    pub fn new(
        p: NormOrder,
        family: BonusFamily,
        r: F,
        scale: ScaleFn<F>,
        m: usize,
    ) -> Result<Self> {
        if r.is_nan() || r <= F::zero() {
            return Err(Error::invalid(
                "bonus radius must be positive (possibly infinite)",
            ));
        }
        if family == BonusFamily::Kl && r != F::one() {
            return Err(Error::invalid("the KL family requires radius r = 1"));
        }
        match scale {
            ScaleFn::LogPlusM { c } | ScaleFn::Const { c } => {
                if c.is_nan() || c < F::zero() {
                    return Err(Error::invalid("scale coefficient must be nonnegative"));
                }
            }
            ScaleFn::CLog { c } => {
                if c.is_nan() || c <= F::zero() {
                    return Err(Error::invalid("c_log scale coefficient must be positive"));
                }
            }
        }
        Ok(BonusSpec {
            p,
            family,
            r,
            scale,
            m,
        })
    }

    /// CUCB defaults: per-arm widths with `f(t) = 1.5 ln t`.
    pub fn cucb(m: usize) -> Self {
        BonusSpec {
            p: NormOrder::Infinity,
            family: BonusFamily::QuadraticCucb,
            r: F::infinity(),
            scale: ScaleFn::CLog {
                c: F::from_f64_c(1.5),
            },
            m,
        }
    }

    /// ESCB defaults: ellipsoidal bonus whose region is
    /// `sum N_i d_i^2 / (ln t + m) <= 1`, i.e. `f(t) = 2 (ln t + m)` under
    /// this crate's `sqrt(f/2 ...)` convention.
    pub fn escb(m: usize) -> Self {
        BonusSpec {
            p: NormOrder::One,
            family: BonusFamily::QuadraticEscb,
            r: F::infinity(),
            scale: ScaleFn::LogPlusM {
                c: F::from_f64_c(2.0),
            },
            m,
        }
    }

    /// ESCB-KL defaults: KL gauges on `[-1,1]` rewards, `f(t) = ln t + m`.
    pub fn escb_kl(m: usize) -> Self {
        BonusSpec {
            p: NormOrder::One,
            family: BonusFamily::Kl,
            r: F::one(),
            scale: ScaleFn::LogPlusM { c: F::one() },
            m,
        }
    }

    pub fn p(&self) -> NormOrder {
        self.p
    }

    pub fn family(&self) -> BonusFamily {
        self.family
    }

    pub fn radius(&self) -> F {
        self.r
    }

    pub fn scale_fn(&self) -> ScaleFn<F> {
        self.scale
    }

    pub fn max_cardinality(&self) -> usize {
        self.m
    }

    /// Evaluates `f(t)` for the round counter `t`.
    pub fn scale_at(&self, t: u64) -> F {
        let t = F::from_count(t.max(1));
        match self.scale {
            ScaleFn::LogPlusM { c } => c * (t.ln() + F::from_size(self.m)),
            ScaleFn::CLog { c } => c * t.ln(),
            ScaleFn::Const { c } => c,
        }
    }
}

/// Per-arm play counts and empirical means.
///
/// `t` is the index of the round about to be played, so the stored values are
/// the counts and means computed from all completed rounds. A fresh instance
/// has `t = 1` and all-zero counts and means.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmStats<F> {
    t: u64,
    counts: Vec<u64>,
    means: Vec<F>,
}

impl<F: Scalar> ArmStats<F> {
    pub fn new(n: usize) -> Self {
        ArmStats {
            t: 1,
            counts: vec![0; n],
            means: vec![F::zero(); n],
        }
    }

    /// Rebuilds stats from recorded state, validating invariants.
    pub fn from_state(t: u64, counts: Vec<u64>, means: Vec<F>) -> Result<Self> {
        if counts.len() != means.len() {
            return Err(Error::invalid("counts and means lengths differ"));
        }
        if t == 0 {
            return Err(Error::invalid("round counter must be at least 1"));
        }
        for (i, (&c, &mu)) in counts.iter().zip(&means).enumerate() {
            if c > t {
                return Err(Error::invalid(format!(
                    "arm {i} has {c} plays but the round counter is {t}"
                )));
            }
            if c == 0 && mu != F::zero() {
                return Err(Error::invalid(format!(
                    "arm {i} has no plays but a nonzero mean"
                )));
            }
            if mu.is_nan() {
                return Err(Error::invalid(format!("arm {i} mean is NaN")));
            }
        }
        Ok(ArmStats { t, counts, means })
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    /// Index of the round about to be played.
    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> &[F] {
        &self.means
    }

    /// Folds one round of semi-bandit feedback into the statistics.
    ///
    /// `observations` must carry exactly one `(arm, value)` pair for every
    /// arm of `played`, in any order.
    pub fn update(&mut self, played: &ActionSet, observations: &[(usize, F)]) -> Result<()> {
        if played.ground_size() != self.arms() {
            return Err(Error::invalid(format!(
                "played set over {} arms, stats track {}",
                played.ground_size(),
                self.arms()
            )));
        }
        if observations.len() != played.len() {
            return Err(Error::invalid(format!(
                "{} observations for an action of {} arms",
                observations.len(),
                played.len()
            )));
        }
        let mut seen = ActionSet::empty(self.arms());
        for &(i, _) in observations {
            if i >= self.arms() || !played.contains(i) {
                return Err(Error::invalid(format!(
                    "observation for arm {i} which was not played"
                )));
            }
            if seen.contains(i) {
                return Err(Error::invalid(format!("duplicate observation for arm {i}")));
            }
            seen.insert(i);
        }
        for &(i, x) in observations {
            self.counts[i] += 1;
            let c = F::from_count(self.counts[i]);
            self.means[i] = self.means[i] + (x - self.means[i]) / c;
        }
        self.t += 1;
        Ok(())
    }
}

/// An exploration-bonus value: the count of unexplored arms in the queried
/// set, and the finite part of the optimistic deviation.
///
/// Values compare lexicographically on `(unexplored, value)`: any additional
/// unexplored arm dominates every finite difference, which is what makes the
/// optimizers prefer forced exploration without arithmetic on infinities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BonusValue<F> {
    pub unexplored: usize,
    pub value: F,
}

impl<F: Scalar> BonusValue<F> {
    pub fn zero() -> Self {
        BonusValue {
            unexplored: 0,
            value: F::zero(),
        }
    }

    pub fn finite(value: F) -> Self {
        BonusValue {
            unexplored: 0,
            value,
        }
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.unexplored.cmp(&other.unexplored).then_with(|| {
            self.value
                .partial_cmp(&other.value)
                .expect("bonus values are NaN-free")
        })
    }

    /// Strictly greater than `other` in the lexicographic order.
    pub fn exceeds(&self, other: &Self) -> bool {
        self.lex_cmp(other) == Ordering::Greater
    }

    /// Strictly greater than `other` by more than `margin`, where the margin
    /// applies only within the same unexplored tier.
    pub fn exceeds_with_margin(&self, other: &Self, margin: F) -> bool {
        match self.unexplored.cmp(&other.unexplored) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.value > other.value + margin,
        }
    }

    /// Greater than the zero value.
    pub fn is_positive(&self) -> bool {
        self.unexplored > 0 || self.value > F::zero()
    }

    /// Adds a finite scalar to the value part.
    pub fn plus(&self, x: F) -> Self {
        BonusValue {
            unexplored: self.unexplored,
            value: self.value + x,
        }
    }
}

/// A set function evaluable on actions, ordered like [`BonusValue`].
///
/// Implementors are normalized (`F(empty) = 0`) and nondecreasing.
pub trait SetFunction<F: Scalar> {
    fn eval(&self, a: &ActionSet) -> Result<BonusValue<F>>;
}

/// The exploration bonus of a confidence region, as a set function.
#[derive(Clone, Copy)]
pub struct ConfidenceBonus<'a, F> {
    pub spec: &'a BonusSpec<F>,
    pub stats: &'a ArmStats<F>,
}

impl<F: Scalar> SetFunction<F> for ConfidenceBonus<'_, F> {
    fn eval(&self, a: &ActionSet) -> Result<BonusValue<F>> {
        bonus_value(self.spec, self.stats, a)
    }
}

/// Per-arm gauge curve of one explored arm.
struct Curve<F> {
    family: BonusFamily,
    count: F,
    mean: F,
    scale: F,
    /// Upper end of the deviation range, `max(r - mean, 0)`.
    cap: F,
}

/// Absolute bisection tolerance on deviations.
fn delta_tol<F: Scalar>() -> F {
    F::from_f64_c(1e-12)
}

impl<F: Scalar> Curve<F> {
    fn new(spec: &BonusSpec<F>, count: u64, mean: F, scale: F) -> Self {
        debug_assert!(count >= 1);
        let cap = if spec.r.is_infinite() {
            F::infinity()
        } else {
            (spec.r - mean).max(F::zero())
        };
        Curve {
            family: spec.family,
            count: F::from_count(count),
            mean,
            scale,
            cap,
        }
    }

    fn g(&self, d: F) -> F {
        if self.scale <= F::zero() {
            return if d > F::zero() {
                F::infinity()
            } else {
                F::zero()
            };
        }
        match self.family {
            BonusFamily::QuadraticCucb => self.count * d * d / self.scale,
            BonusFamily::QuadraticEscb => F::from_f64_c(2.0) * self.count * d * d / self.scale,
            BonusFamily::Kl => {
                let half = F::from_f64_c(0.5);
                let x = (F::one() + self.mean) * half;
                let y = (F::one() + self.mean + d) * half;
                self.count * kl(x, y) / self.scale
            }
        }
    }

    fn g_prime(&self, d: F) -> F {
        if self.scale <= F::zero() {
            return F::infinity();
        }
        let two = F::from_f64_c(2.0);
        match self.family {
            BonusFamily::QuadraticCucb => two * self.count * d / self.scale,
            BonusFamily::QuadraticEscb => two * two * self.count * d / self.scale,
            BonusFamily::Kl => {
                let half = F::from_f64_c(0.5);
                let x = (F::one() + self.mean) * half;
                let y = (F::one() + self.mean + d) * half;
                let denom = y * (F::one() - y);
                if denom <= F::zero() {
                    F::infinity()
                } else {
                    self.count * (y - x) / (two * self.scale * denom)
                }
            }
        }
    }

    /// Inverse of the derivative, capped at the deviation range: the largest
    /// deviation whose marginal gauge cost stays below `w`.
    fn g_prime_inv_capped(&self, w: F) -> F {
        if w <= F::zero() || self.scale <= F::zero() || self.cap <= F::zero() {
            return F::zero();
        }
        match self.family {
            BonusFamily::QuadraticCucb => {
                (w * self.scale / (F::from_f64_c(2.0) * self.count)).min(self.cap)
            }
            BonusFamily::QuadraticEscb => {
                (w * self.scale / (F::from_f64_c(4.0) * self.count)).min(self.cap)
            }
            BonusFamily::Kl => {
                if self.g_prime(self.cap) <= w {
                    return self.cap;
                }
                let (mut lo, mut hi) = (F::zero(), self.cap);
                let tol = delta_tol::<F>();
                while hi - lo > tol {
                    let mid = (lo + hi) * F::from_f64_c(0.5);
                    if self.g_prime(mid) < w {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (lo + hi) * F::from_f64_c(0.5)
            }
        }
    }

    /// `min(g^{-1}(1), cap)`: the one-sided confidence width of the arm.
    fn width(&self) -> F {
        if self.cap <= F::zero() {
            return F::zero();
        }
        if self.scale <= F::zero() {
            return F::zero();
        }
        match self.family {
            BonusFamily::QuadraticCucb => (self.scale / self.count).sqrt().min(self.cap),
            BonusFamily::QuadraticEscb => (self.scale / (F::from_f64_c(2.0) * self.count))
                .sqrt()
                .min(self.cap),
            BonusFamily::Kl => {
                if self.g(self.cap) <= F::one() {
                    return self.cap;
                }
                let (mut lo, mut hi) = (F::zero(), self.cap);
                let tol = delta_tol::<F>();
                while hi - lo > tol {
                    let mid = (lo + hi) * F::from_f64_c(0.5);
                    if self.g(mid) <= F::one() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }
}

fn curve_for_arm<F: Scalar>(spec: &BonusSpec<F>, stats: &ArmStats<F>, i: usize) -> Curve<F> {
    Curve::new(
        spec,
        stats.counts()[i],
        stats.means()[i],
        spec.scale_at(stats.round()),
    )
}

/// Bernoulli KL divergence with the usual endpoint conventions:
/// `kl(0,0) = kl(1,1) = 0`, `kl(x,1) = inf` for `x < 1`, `kl(x,0) = inf`
/// for `x > 0`.
pub fn kl<F: Scalar>(x: F, y: F) -> F {
    let zero = F::zero();
    let one = F::one();
    let mut acc = zero;
    if x > zero {
        if y <= zero {
            return F::infinity();
        }
        acc = acc + x * (x / y).ln();
    }
    if x < one {
        if y >= one {
            return F::infinity();
        }
        acc = acc + (one - x) * ((one - x) / (one - y)).ln();
    }
    acc.max(zero)
}

/// One-sided confidence width of every arm: `min(g^{-1}(1), r - mean)` for
/// explored arms, the radius (or an infinite sentinel) for unexplored ones.
pub fn per_arm_width<F: Scalar>(spec: &BonusSpec<F>, stats: &ArmStats<F>) -> Vec<F> {
    (0..stats.arms())
        .map(|i| {
            if stats.counts()[i] == 0 {
                if spec.r.is_infinite() {
                    F::infinity()
                } else {
                    spec.r
                }
            } else {
                curve_for_arm(spec, stats, i).width()
            }
        })
        .collect()
}

/// Solution of the coupled `p = 1` maximization over one action.
#[derive(Clone, Debug)]
pub struct LambdaSolution<F> {
    /// Smallest multiplier making the gauge budget feasible.
    pub lambda: F,
    /// Optimal deviation per arm (zero off the action).
    pub delta: Vec<F>,
    /// Total optimistic deviation of the action.
    pub bonus: F,
}

/// Solves the `p = 1` bonus maximization by bisection on the multiplier.
///
/// Finds the smallest `lambda >= 0` such that the total gauge cost of the
/// capped deviations `f_i(lambda)` is within budget, then reports those
/// deviations. Requires `p = 1` and every arm of `a` to have been played.
pub fn solve_lambda<F: Scalar>(
    spec: &BonusSpec<F>,
    stats: &ArmStats<F>,
    a: &ActionSet,
) -> Result<LambdaSolution<F>> {
    if spec.p != NormOrder::One {
        return Err(Error::invalid("solve_lambda requires a p = 1 region"));
    }
    if a.ground_size() != stats.arms() {
        return Err(Error::invalid("action and stats ground sizes differ"));
    }
    let arms: Vec<usize> = a.iter().collect();
    if let Some(&i) = arms.iter().find(|&&i| stats.counts()[i] == 0) {
        return Err(Error::invalid(format!(
            "solve_lambda requires explored arms, arm {i} has no plays"
        )));
    }
    let curves: Vec<Curve<F>> = arms
        .iter()
        .map(|&i| curve_for_arm(spec, stats, i))
        .collect();
    let (lambda, deltas) = solve_region(&curves)?;
    let mut delta = vec![F::zero(); stats.arms()];
    let mut bonus = F::zero();
    for (&i, d) in arms.iter().zip(&deltas) {
        delta[i] = *d;
        bonus = bonus + *d;
    }
    Ok(LambdaSolution {
        lambda,
        delta,
        bonus,
    })
}

/// Bisection on the multiplier for a list of explored-arm curves.
fn solve_region<F: Scalar>(curves: &[Curve<F>]) -> Result<(F, Vec<F>)> {
    if curves.is_empty() {
        return Ok((F::zero(), Vec::new()));
    }
    let budget = F::one();
    let deviations = |lambda: F| -> Vec<F> {
        let w = budget / lambda;
        curves.iter().map(|c| c.g_prime_inv_capped(w)).collect()
    };
    let cost = |ds: &[F]| -> F {
        curves
            .iter()
            .zip(ds)
            .map(|(c, &d)| c.g(d))
            .fold(F::zero(), |acc, g| acc + g)
    };

    // lambda = 0 saturates every cap; feasible only with finite caps.
    if curves.iter().all(|c| c.cap.is_finite()) {
        let caps: Vec<F> = curves.iter().map(|c| c.cap).collect();
        if cost(&caps) <= budget {
            return Ok((F::zero(), caps));
        }
    }

    let mut hi = F::one();
    let mut steps = 0;
    while cost(&deviations(hi)) > budget {
        hi = hi + hi;
        steps += 1;
        if steps > 200 {
            return Err(Error::Numerical {
                context: "solve_lambda",
                details: format!("no feasible multiplier found up to lambda = {hi}"),
            });
        }
    }
    let mut lo = F::zero();
    let rel = F::from_f64_c(1e-12);
    let floor = F::from_f64_c(1e-14) * hi;
    let mut iters = 0;
    while hi - lo > (rel * hi).max(floor) {
        iters += 1;
        if iters > 200 {
            return Err(Error::Numerical {
                context: "solve_lambda",
                details: format!(
                    "bisection stalled: bracket [{lo}, {hi}] after {iters} iterations"
                ),
            });
        }
        let mid = (lo + hi) * F::from_f64_c(0.5);
        if cost(&deviations(mid)) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, deviations(hi)))
}

/// Exploration bonus of an action under the given confidence region.
///
/// The unexplored arms of `a` are counted in the tier; under a finite radius
/// each also contributes a width of `r` to the value. Explored arms
/// contribute width sums (`p = inf`) or the coupled maximum (`p = 1`).
pub fn bonus_value<F: Scalar>(
    spec: &BonusSpec<F>,
    stats: &ArmStats<F>,
    a: &ActionSet,
) -> Result<BonusValue<F>> {
    if a.ground_size() != stats.arms() {
        return Err(Error::invalid("action and stats ground sizes differ"));
    }
    let mut unexplored = 0usize;
    let mut explored = Vec::new();
    for i in a.iter() {
        if stats.counts()[i] == 0 {
            unexplored += 1;
        } else {
            explored.push(i);
        }
    }
    let mut value = F::zero();
    if spec.r.is_finite() {
        value = value + spec.r * F::from_size(unexplored);
    }
    match spec.p {
        NormOrder::Infinity => {
            for &i in &explored {
                value = value + curve_for_arm(spec, stats, i).width();
            }
        }
        NormOrder::One => {
            if spec.r.is_infinite() && spec.family != BonusFamily::Kl {
                // Closed form: sqrt of the summed inverse gauge curvatures.
                let scale = spec.scale_at(stats.round());
                let mut sum = F::zero();
                for &i in &explored {
                    let count = F::from_count(stats.counts()[i]);
                    let inv_alpha = match spec.family {
                        BonusFamily::QuadraticCucb => scale / count,
                        BonusFamily::QuadraticEscb => scale / (F::from_f64_c(2.0) * count),
                        BonusFamily::Kl => unreachable!(),
                    };
                    sum = sum + inv_alpha;
                }
                value = value + sum.sqrt();
            } else {
                let curves: Vec<Curve<F>> = explored
                    .iter()
                    .map(|&i| curve_for_arm(spec, stats, i))
                    .collect();
                let (_, deltas) = solve_region(&curves)?;
                for d in deltas {
                    value = value + d;
                }
            }
        }
    }
    Ok(BonusValue { unexplored, value })
}

/// Optimistic index of an action: empirical value plus exploration bonus,
/// with the lexicographic unexplored convention.
pub fn index_value<F: Scalar>(
    spec: &BonusSpec<F>,
    stats: &ArmStats<F>,
    a: &ActionSet,
) -> Result<BonusValue<F>> {
    let bonus = bonus_value(spec, stats, a)?;
    let mean: F = a.iter().map(|i| stats.means()[i]).sum();
    Ok(bonus.plus(mean))
}
