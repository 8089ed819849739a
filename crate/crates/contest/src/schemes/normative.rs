//! First-best benchmark: maximize total production subject to the budget
//! covering every producer's cost.
//!
//! At the optimum all producing agents share a common marginal cost m (the
//! inverse of the budget's shadow price λ = 1/m), idle agents have φ′(0) ≥ m,
//! and the budget binds. Producers with constant marginal cost cap m at the
//! cheapest such coefficient: if the strictly convex producers cannot absorb
//! the whole budget at that cap, the remainder goes to the cheapest linear
//! producer (lowest index on ties).

use crate::cost_model::CostProfile;
use crate::numeric::{bisect_increasing, bracket_increasing, OUTER_MAX_ITER, OUTER_REL_TOL};
use crate::schemes::{invert_marginal, Scheme, SchemeOutcome, SolveError};

/// Solves the first-best program. The returned `multiplier` is the shadow
/// price of the budget, λ = 1/m.
pub fn solve_normative(profile: &CostProfile) -> Result<SchemeOutcome, SolveError> {
    let m_budget = profile.budget();
    let costs = profile.costs();

    // Cheapest constant-marginal-cost producer, lowest index on ties.
    let cheapest_linear = costs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.linear_coefficient().map(|coef| (i, coef)))
        .min_by(|a, b| a.1.total_cmp(&b.1));

    // Budget spent by the strictly convex producers when the common marginal
    // cost is `m`; +∞ past a linear producer's coefficient.
    let spend_at = |m: f64| -> f64 {
        costs
            .iter()
            .filter(|c| c.is_strictly_convex())
            .map(|c| c.value_at(invert_marginal(c, m)))
            .sum()
    };

    if let Some((idx, c_min)) = cheapest_linear {
        let spent = spend_at(c_min);
        if spent < m_budget {
            // Convex producers are exhausted at the cap; the cheapest linear
            // producer absorbs the leftover budget at cost c_min per unit.
            // Other linear producers have coefficients ≥ c_min and stay idle.
            let mut production: Vec<f64> =
                costs.iter().map(|c| invert_marginal(c, c_min)).collect();
            production[idx] = (m_budget - spent) / c_min;
            return Ok(finish(profile, production, c_min));
        }
    }

    // Otherwise the budget is exhausted strictly below any linear cap: find
    // the marginal cost level at which convex spending meets the budget.
    let g = |m: f64| spend_at(m) - m_budget;
    let start = cheapest_linear.map(|(_, c)| c).unwrap_or(1.0);
    let bracket = bracket_increasing(&g, start, crate::numeric::MAX_GROWTH_STEPS).map_err(
        |failure| SolveError::BracketFailed {
            quantity: "the first-best marginal cost level",
            lo: failure.last.lo,
            hi: failure.last.hi,
        },
    )?;
    let m_star = bisect_increasing(&g, bracket, OUTER_REL_TOL, OUTER_MAX_ITER);
    let production: Vec<f64> = costs.iter().map(|c| invert_marginal(c, m_star)).collect();
    Ok(finish(profile, production, m_star))
}

fn finish(profile: &CostProfile, production: Vec<f64>, marginal: f64) -> SchemeOutcome {
    let rewards: Vec<f64> =
        profile.costs().iter().zip(&production).map(|(c, &x)| c.value_at(x)).collect();
    SchemeOutcome {
        scheme: Scheme::Normative,
        total: production.iter().sum(),
        production,
        rewards,
        multiplier: Some(1.0 / marginal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::CostFunction;

    fn profile(costs: Vec<CostFunction>, budget: f64) -> CostProfile {
        CostProfile::new(costs, budget).unwrap()
    }

    #[test]
    fn two_identical_squares() {
        // φ(x) = x² each, M = 1: split evenly, total √2, shadow price 1/√2.
        let p = profile(
            vec![CostFunction::power(1.0, 2.0).unwrap(), CostFunction::power(1.0, 2.0).unwrap()],
            1.0,
        );
        let out = solve_normative(&p).unwrap();
        assert!((out.total - 2.0f64.sqrt()).abs() < 1e-12);
        for &x in &out.production {
            assert!((x - 0.5f64.sqrt()).abs() < 1e-12);
        }
        assert!((out.multiplier.unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let spent: f64 = out.rewards.iter().sum();
        assert!((spent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_linear_goes_to_the_cheapest() {
        let p = profile(
            vec![
                CostFunction::linear(1.0).unwrap(),
                CostFunction::linear(2.0).unwrap(),
                CostFunction::linear(3.0).unwrap(),
                CostFunction::linear(4.0).unwrap(),
            ],
            1.0,
        );
        let out = solve_normative(&p).unwrap();
        assert_eq!(out.production, vec![1.0, 0.0, 0.0, 0.0]);
        assert!((out.total - 1.0).abs() < 1e-15);
        assert_eq!(out.multiplier, Some(1.0));
    }

    #[test]
    fn tied_linear_costs_pick_the_lowest_index() {
        let p = profile(
            vec![
                CostFunction::linear(2.0).unwrap(),
                CostFunction::linear(2.0).unwrap(),
            ],
            4.0,
        );
        let out = solve_normative(&p).unwrap();
        assert_eq!(out.production, vec![2.0, 0.0]);
    }

    #[test]
    fn mixed_convex_and_linear_splits_the_budget() {
        // φ₁(x) = x², φ₂(x) = x, M = 3. Cap m = 1: producer 1 supplies 1/2 at
        // cost 1/4, producer 2 absorbs the remaining 11/4 of budget.
        let p = profile(
            vec![CostFunction::power(1.0, 2.0).unwrap(), CostFunction::linear(1.0).unwrap()],
            3.0,
        );
        let out = solve_normative(&p).unwrap();
        assert!((out.production[0] - 0.5).abs() < 1e-12);
        assert!((out.production[1] - 2.75).abs() < 1e-12);
        assert_eq!(out.multiplier, Some(1.0));
    }

    #[test]
    fn linear_cap_binds_when_convex_producers_absorb_everything() {
        // φ₁(x) = x², φ₂(x) = 10·x, M = 1. At the cap m = 10 producer 1 would
        // spend 25 ≫ 1, so the optimum stays below the cap and the linear
        // producer is idle.
        let p = profile(
            vec![CostFunction::power(1.0, 2.0).unwrap(), CostFunction::linear(10.0).unwrap()],
            1.0,
        );
        let out = solve_normative(&p).unwrap();
        assert_eq!(out.production[1], 0.0);
        assert!((out.production[0] - 1.0).abs() < 1e-10);
        assert!((out.total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn budget_always_binds() {
        let p = profile(
            vec![
                CostFunction::power(0.7, 3.0).unwrap(),
                CostFunction::power(2.0, 1.5).unwrap(),
                CostFunction::power(1.0, 2.0).unwrap(),
            ],
            2.5,
        );
        let out = solve_normative(&p).unwrap();
        let spent: f64 = out.rewards.iter().sum();
        assert!((spent - 2.5).abs() < 1e-9, "spent {spent}");
        // Common marginal cost across active producers.
        let m = 1.0 / out.multiplier.unwrap();
        for (c, &x) in p.costs().iter().zip(&out.production) {
            assert!(x > 0.0);
            assert!((c.marginal(x).unwrap() - m).abs() < 1e-8 * m);
        }
    }

    #[test]
    fn single_producer_spends_the_budget() {
        let p = profile(vec![CostFunction::power(2.0, 2.0).unwrap()], 8.0);
        let out = solve_normative(&p).unwrap();
        // 2x² = 8 ⇒ x = 2.
        assert!((out.production[0] - 2.0).abs() < 1e-12);
    }
}
