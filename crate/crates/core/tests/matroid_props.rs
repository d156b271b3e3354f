//! Matroid axiom and greedy-optimality properties on small random instances.

mod common;

use std::collections::HashSet;

use common::{both_modes, random_matroid, rng};
use msb_core::{ActionSet, ConstraintMode, Matroid};
use rand::Rng;

fn check_axioms(m: &Matroid) {
    let independents = m
        .enumerate_feasible(ConstraintMode::IndependentSets)
        .unwrap();
    let family: HashSet<ActionSet> = independents.iter().cloned().collect();
    assert!(family.contains(&ActionSet::empty(m.ground_size())));

    for a in &independents {
        for x in a.iter() {
            assert!(
                family.contains(&a.without(x)),
                "hereditary violated: {:?} independent but {:?} is not",
                a.indices(),
                a.without(x).indices()
            );
        }
    }
    for a in &independents {
        for b in &independents {
            if a.len() > b.len() {
                let exchangeable = a
                    .iter()
                    .any(|x| !b.contains(x) && family.contains(&b.with(x)));
                assert!(
                    exchangeable,
                    "exchange violated between {:?} and {:?}",
                    a.indices(),
                    b.indices()
                );
            }
        }
    }

    let bases = m.enumerate_feasible(ConstraintMode::Bases).unwrap();
    for b in &bases {
        assert_eq!(b.len(), m.rank());
        assert!(m.is_independent(b).unwrap());
    }
}

#[test]
fn axioms_hold_exhaustively_up_to_n10() {
    let mut rng = rng(101);
    for _ in 0..15 {
        let n = rng.random_range(1..=10usize);
        check_axioms(&random_matroid(&mut rng, n));
    }
    check_axioms(&Matroid::complete_graph(5));
}

#[test]
fn greedy_matches_enumeration_on_random_weighted_instances() {
    let mut rng = rng(202);
    for trial in 0..120 {
        let n = rng.random_range(1..=8usize);
        let m = random_matroid(&mut rng, n);
        let integer_weights = trial % 2 == 0;
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                if integer_weights {
                    rng.random_range(-5..=5i32) as f64
                } else {
                    rng.random::<f64>() * 2.0 - 1.0
                }
            })
            .collect();
        for mode in both_modes() {
            let s = m.linear_max_greedy(&weights, mode).unwrap();
            let value: f64 = s.iter().map(|i| weights[i]).sum();
            let best = m
                .enumerate_feasible(mode)
                .unwrap()
                .iter()
                .map(|a| a.iter().map(|i| weights[i]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            if integer_weights {
                assert_eq!(value, best, "greedy missed the optimum: {weights:?}");
            } else {
                assert!((value - best).abs() <= 1e-12);
            }
            assert!(m.is_independent(&s).unwrap());
            if mode == ConstraintMode::Bases {
                assert_eq!(s.len(), m.rank());
            }
        }
    }
}
