//! Combinatorial semi-bandits under matroid constraints.
//!
//! The library covers the full pipeline of a confidence-region bandit:
//!
//! * [`matroid`] — uniform, partition, and graphic matroids with an
//!   independence oracle, rank, greedy linear maximization, and exhaustive
//!   enumeration for testing.
//! * [`bonus`] — per-arm statistics and exploration bonuses: additive widths
//!   for infinity-norm regions, and the submodular set-function bonus of
//!   1-norm regions (closed form or bisection, quadratic or Bernoulli-KL
//!   gauges).
//! * [`maximize`] — approximate maximizers of a linear-plus-submodular
//!   objective: local search on independent sets, greedy on bases, plus a
//!   brute-force oracle.
//! * [`budget`] — cost/reward ratio minimization through a Lagrangian
//!   binary search.
//! * [`engine`] — environments, the index policies (CUCB, ESCB variants,
//!   budgeted ratio), and deterministic regret simulation.
//!
//! All numeric code is generic over the scalar type through [`Scalar`];
//! the `*64` aliases below pin the common `f64` instantiations.

pub mod action;
pub mod bonus;
pub mod budget;
pub mod engine;
pub mod error;
pub mod matroid;
pub mod maximize;
pub mod scalar;

pub use action::ActionSet;
pub use error::{Error, Result};
pub use matroid::{ConstraintMode, Matroid, MatroidKind};
pub use scalar::Scalar;

/// `f64` instantiations of the generic building blocks.
pub type ArmStats64 = bonus::ArmStats<f64>;
pub type BonusSpec64 = bonus::BonusSpec<f64>;
pub type BonusValue64 = bonus::BonusValue<f64>;
pub type Environment64 = engine::Environment<f64>;
pub type Policy64 = engine::Policy<f64>;
pub type RegretTrace64 = engine::RegretTrace<f64>;
