//! Approximation-guarantee and submodular-inequality properties of the
//! maximizers, against the exhaustive oracle.

mod common;

use common::{all_subsets, random_explored_stats, random_matroid, random_p1_spec, rng};
use msb_core::bonus::{bonus_value, BonusFamily, ConfidenceBonus, SetFunction};
use msb_core::maximize::{
    brute_force_max, greedy_bases, local_search, LinearFn, LocalSearchParams, SplitObjective,
};
use msb_core::ConstraintMode;
use rand::Rng;

#[test]
fn local_search_meets_its_guarantee_on_random_instances() {
    let mut rng = rng(808);
    let epsilon = 0.1;
    for _ in 0..60 {
        let n = rng.random_range(1..=7usize);
        let m = random_matroid(&mut rng, n);
        let spec = random_p1_spec(&mut rng);
        let bound = if spec.family() == BonusFamily::Kl {
            0.9
        } else {
            1.0
        };
        let stats = random_explored_stats(&mut rng, n, bound);
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let bonus = ConfidenceBonus {
            spec: &spec,
            stats: &stats,
        };
        let obj = SplitObjective::new(LinearFn::from_weights(weights), &bonus, true);

        let out = local_search(&m, &obj, &LocalSearchParams::new(epsilon)).unwrap();
        assert!(m.is_independent(&out.set).unwrap());

        let brute = brute_force_max(&m, &obj, ConstraintMode::IndependentSets).unwrap();
        let l = obj.linear.eval(&out.set);
        let f = bonus.eval(&out.set).unwrap().value;
        assert!(
            l + 2.0 * (1.0 + epsilon) * f + 1e-9 >= brute.value.value,
            "guarantee violated: {} vs optimum {}",
            l + 2.0 * (1.0 + epsilon) * f,
            brute.value.value
        );
        // The search never loses to its own starting point.
        let start = m
            .linear_max_greedy(&obj.linear.weights, ConstraintMode::IndependentSets)
            .unwrap();
        let start_val = obj.value(&start).unwrap();
        assert!(out.value.lex_cmp(&start_val) != std::cmp::Ordering::Less);
    }
}

#[test]
fn greedy_meets_its_guarantee_on_random_basis_instances() {
    let mut rng = rng(909);
    for _ in 0..60 {
        let n = rng.random_range(1..=7usize);
        let m = random_matroid(&mut rng, n);
        let spec = random_p1_spec(&mut rng);
        let bound = if spec.family() == BonusFamily::Kl {
            0.9
        } else {
            1.0
        };
        let stats = random_explored_stats(&mut rng, n, bound);
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let bonus = ConfidenceBonus {
            spec: &spec,
            stats: &stats,
        };
        let obj = SplitObjective::new(LinearFn::from_weights(weights), &bonus, false);

        let out = greedy_bases(&m, &obj).unwrap();
        assert_eq!(out.set.len(), m.rank(), "output must be a basis");
        assert!(m.is_independent(&out.set).unwrap());

        let brute = brute_force_max(&m, &obj, ConstraintMode::Bases).unwrap();
        let l = obj.linear.eval(&out.set);
        let f = bonus.eval(&out.set).unwrap().value;
        assert!(
            l + 2.0 * f + 1e-9 >= brute.value.value,
            "guarantee violated: {} vs optimum {}",
            l + 2.0 * f,
            brute.value.value
        );
    }
}

#[test]
fn bonus_family_satisfies_the_exchange_inequalities() {
    // For submodular F and arbitrary A, B:
    //   sum_{b in B\A} (F(B) - F(B\{b}))  <=  F(B) - F(A&B)
    //   sum_{a in A\B} (F(B+{a}) - F(B))  >=  F(A|B) - F(B)
    let mut rng = rng(1010);
    for _ in 0..100 {
        let n = rng.random_range(2..=7usize);
        let spec = random_p1_spec(&mut rng);
        let bound = if spec.family() == BonusFamily::Kl {
            0.9
        } else {
            1.0
        };
        let stats = random_explored_stats(&mut rng, n, bound);
        let subsets = all_subsets(n);
        let vals: Vec<f64> = subsets
            .iter()
            .map(|a| bonus_value(&spec, &stats, a).unwrap().value)
            .collect();
        let a_mask = rng.random_range(0..1usize << n);
        let b_mask = rng.random_range(0..1usize << n);

        let mut deletions = 0.0;
        let mut additions = 0.0;
        for i in 0..n {
            if b_mask >> i & 1 == 1 && a_mask >> i & 1 == 0 {
                deletions += vals[b_mask] - vals[b_mask & !(1 << i)];
            }
            if a_mask >> i & 1 == 1 && b_mask >> i & 1 == 0 {
                additions += vals[b_mask | 1 << i] - vals[b_mask];
            }
        }
        assert!(deletions <= vals[b_mask] - vals[a_mask & b_mask] + 1e-9);
        assert!(additions >= vals[a_mask | b_mask] - vals[b_mask] - 1e-9);
    }
}
