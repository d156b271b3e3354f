//! Shared deterministic generators for the property suites.
#![allow(dead_code)] // each test binary uses a subset

use msb_core::bonus::{ArmStats, BonusFamily, BonusSpec, NormOrder, ScaleFn};
use msb_core::{ActionSet, ConstraintMode, Matroid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random uniform, partition, or graphic matroid on `n` elements.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize) -> Matroid {
    match rng.random_range(0..3u8) {
        0 => Matroid::uniform(n, rng.random_range(0..=n)).unwrap(),
        1 => {
            let group_count = rng.random_range(1..=3usize.min(n));
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); group_count];
            for i in 0..n {
                groups[rng.random_range(0..group_count)].push(i);
            }
            groups.retain(|g| !g.is_empty());
            let caps = groups
                .iter()
                .map(|g| rng.random_range(0..=g.len()))
                .collect();
            Matroid::partition(groups, caps).unwrap()
        }
        _ => {
            let v = rng.random_range(2..=5usize);
            let edges = (0..n)
                .map(|_| {
                    let u = rng.random_range(0..v);
                    let mut w = rng.random_range(0..v - 1);
                    if w >= u {
                        w += 1;
                    }
                    (u, w)
                })
                .collect();
            Matroid::graphic(v, edges).unwrap()
        }
    }
}

/// Random fully-explored statistics with means in `[-bound, bound]`.
pub fn random_explored_stats(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> ArmStats<f64> {
    let counts: Vec<u64> = (0..n).map(|_| rng.random_range(1..=40u64)).collect();
    let means: Vec<f64> = (0..n)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * bound)
        .collect();
    let t = counts.iter().copied().max().unwrap_or(0) + rng.random_range(1..=20u64);
    ArmStats::from_state(t, counts, means).unwrap()
}

/// A random p = 1 bonus family with a pinned constant scale.
pub fn random_p1_spec(rng: &mut ChaCha8Rng) -> BonusSpec<f64> {
    let c = 0.3 + rng.random::<f64>() * 2.5;
    match rng.random_range(0..4u8) {
        0 => BonusSpec::new(
            NormOrder::One,
            BonusFamily::QuadraticCucb,
            f64::INFINITY,
            ScaleFn::Const { c },
            4,
        )
        .unwrap(),
        1 => BonusSpec::new(
            NormOrder::One,
            BonusFamily::QuadraticEscb,
            f64::INFINITY,
            ScaleFn::Const { c },
            4,
        )
        .unwrap(),
        2 => BonusSpec::new(
            NormOrder::One,
            BonusFamily::QuadraticEscb,
            2.0,
            ScaleFn::Const { c },
            4,
        )
        .unwrap(),
        _ => BonusSpec::new(
            NormOrder::One,
            BonusFamily::Kl,
            1.0,
            ScaleFn::Const { c },
            4,
        )
        .unwrap(),
    }
}

/// All subsets of `[n]` as bit masks paired with action sets.
pub fn all_subsets(n: usize) -> Vec<ActionSet> {
    (0..1u32 << n)
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            ActionSet::from_indices(n, &idx).unwrap()
        })
        .collect()
}

pub fn both_modes() -> [ConstraintMode; 2] {
    [ConstraintMode::IndependentSets, ConstraintMode::Bases]
}
