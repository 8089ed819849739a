//! Optimal production under three compensation schemes.
//!
//! A designer splits a fixed budget M among N producers whose convex cost
//! functions are private. This crate computes, for a given cost profile, the
//! total production achieved by
//!
//! * the **normative** scheme — the first-best benchmark that maximizes total
//!   output subject to the budget covering every producer's cost,
//! * a **piece rate** — the best uniform per-unit price that exactly exhausts
//!   the budget, and
//! * the **proportional** scheme — each producer receives the budget share
//!   equal to their share of total output, played non-cooperatively; the
//!   solver finds the unique Nash equilibrium.
//!
//! On top of the solvers sit efficiency metrics (the ratios of the normative
//! and piece-rate totals to the equilibrium total, and the dissipation — the
//! budget fraction lost to rent-seeking), closed forms for power and linear
//! costs, Monte Carlo experiments over random cost populations, a streaming
//! path for populations too large to hold in memory, and no-regret learning
//! dynamics that converge to the proportional equilibrium.

pub mod anarchy;
pub mod cost_model;
pub mod experiments;
pub mod learning;
mod numeric;
pub mod schemes;

pub use cost_model::{CostFunction, CostProfile};
pub use schemes::{EquilibriumSolution, Scheme, SchemeOutcome, SolveError};
