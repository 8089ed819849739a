//! Closed-form solutions for power and linear cost profiles.
//!
//! These are independent of the numeric solvers — direct transcriptions of
//! the analytic formulas — and serve as cross-checks and as the fast path for
//! very large linear populations.
//!
//! For power costs cᵢ·x^α with a common α > 1, everything is governed by the
//! aggregate S = Σ cᵢ^{−1/(α−1)}:
//!
//! * first-best total  s* = M^{1/α}·S^{(α−1)/α}
//! * piece-rate total  ŝ = (M/α)^{1/α}·S^{(α−1)/α}, so ŝ·α^{1/α} = s*
//! * piece rate        μ = α^{1/α}·(M/S)^{(α−1)/α}
//!
//! For linear costs the proportional equilibrium keeps only the `l` cheapest
//! producers active, where `l` is found by scanning the ascending costs, and
//! the aggregate is s̄ = M(l−1)/Σ_{i≤l} cᵢ.

use crate::cost_model::CostProfile;
use crate::schemes::{EquilibriumSolution, SolveError};

fn check_power_args(coefficients: &[f64], alpha: f64) -> Result<(), SolveError> {
    if coefficients.is_empty() {
        return Err(SolveError::ClosedFormDomain { requirement: "at least one producer" });
    }
    if !coefficients.iter().all(|c| c.is_finite() && *c > 0.0) {
        return Err(SolveError::ClosedFormDomain {
            requirement: "positive finite cost coefficients",
        });
    }
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "a common exponent above 1" });
    }
    Ok(())
}

fn check_budget(budget: f64) -> Result<(), SolveError> {
    if budget > 0.0 && budget.is_finite() {
        Ok(())
    } else {
        Err(SolveError::ClosedFormDomain { requirement: "a positive finite budget" })
    }
}

fn check_sorted(costs: &[f64]) -> Result<(), SolveError> {
    if !costs.iter().all(|c| c.is_finite() && *c > 0.0) {
        return Err(SolveError::ClosedFormDomain {
            requirement: "positive finite cost coefficients",
        });
    }
    if costs.windows(2).any(|w| w[0] > w[1]) {
        return Err(SolveError::ClosedFormDomain { requirement: "costs sorted ascending" });
    }
    Ok(())
}

/// Σ cᵢ^{−1/(α−1)}, the power-cost aggregate.
fn power_aggregate(coefficients: &[f64], alpha: f64) -> f64 {
    let e = -1.0 / (alpha - 1.0);
    coefficients.iter().map(|c| c.powf(e)).sum()
}

/// First-best total for power costs cᵢ·x^α sharing α > 1.
pub fn power_normative_total(
    coefficients: &[f64],
    alpha: f64,
    budget: f64,
) -> Result<f64, SolveError> {
    check_power_args(coefficients, alpha)?;
    check_budget(budget)?;
    let s = power_aggregate(coefficients, alpha);
    Ok(budget.powf(1.0 / alpha) * s.powf((alpha - 1.0) / alpha))
}

/// Total production under the budget-exhausting piece rate, power costs.
pub fn power_piece_rate_total(
    coefficients: &[f64],
    alpha: f64,
    budget: f64,
) -> Result<f64, SolveError> {
    check_power_args(coefficients, alpha)?;
    check_budget(budget)?;
    let s = power_aggregate(coefficients, alpha);
    Ok((budget / alpha).powf(1.0 / alpha) * s.powf((alpha - 1.0) / alpha))
}

/// The budget-exhausting piece rate itself, power costs.
pub fn power_piece_rate_multiplier(
    coefficients: &[f64],
    alpha: f64,
    budget: f64,
) -> Result<f64, SolveError> {
    check_power_args(coefficients, alpha)?;
    check_budget(budget)?;
    let s = power_aggregate(coefficients, alpha);
    Ok(alpha.powf(1.0 / alpha) * (budget / s).powf((alpha - 1.0) / alpha))
}

/// First-best total for n identical producers with cost c·x^α. Needs α ≥ 1;
/// at α = 1 the whole budget flows at marginal cost c, giving M/c.
pub fn identical_power_normative_total(
    coefficient: f64,
    alpha: f64,
    n: usize,
    budget: f64,
) -> Result<f64, SolveError> {
    check_identical(coefficient, alpha, n, budget)?;
    if alpha == 1.0 {
        return Ok(budget / coefficient);
    }
    let s = n as f64 * coefficient.powf(-1.0 / (alpha - 1.0));
    Ok(budget.powf(1.0 / alpha) * s.powf((alpha - 1.0) / alpha))
}

/// Piece-rate total for n identical producers with cost c·x^α, α > 1.
pub fn identical_power_piece_rate_total(
    coefficient: f64,
    alpha: f64,
    n: usize,
    budget: f64,
) -> Result<f64, SolveError> {
    check_identical(coefficient, alpha, n, budget)?;
    if alpha <= 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "a common exponent above 1" });
    }
    let s = n as f64 * coefficient.powf(-1.0 / (alpha - 1.0));
    Ok((budget / alpha).powf(1.0 / alpha) * s.powf((alpha - 1.0) / alpha))
}

fn check_identical(coefficient: f64, alpha: f64, n: usize, budget: f64) -> Result<(), SolveError> {
    if n == 0 {
        return Err(SolveError::TooFewProducers { need: 1, have: 0 });
    }
    if !(coefficient > 0.0 && coefficient.is_finite()) {
        return Err(SolveError::ClosedFormDomain {
            requirement: "positive finite cost coefficients",
        });
    }
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "an exponent of at least 1" });
    }
    check_budget(budget)
}

/// Proportional-equilibrium aggregate for n identical producers with cost
/// c·x^α (α ≥ 1): s̄ = n^{1−2/α}·(M(n−1)/(αc))^{1/α}.
pub fn symmetric_power_equilibrium_total(
    coefficient: f64,
    alpha: f64,
    n: usize,
    budget: f64,
) -> Result<f64, SolveError> {
    if n < 2 {
        return Err(SolveError::TooFewProducers { need: 2, have: n });
    }
    if !(coefficient > 0.0 && coefficient.is_finite()) {
        return Err(SolveError::ClosedFormDomain {
            requirement: "positive finite cost coefficients",
        });
    }
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "an exponent of at least 1" });
    }
    check_budget(budget)?;
    let n = n as f64;
    Ok(n.powf(1.0 - 2.0 / alpha) * (budget * (n - 1.0) / (alpha * coefficient)).powf(1.0 / alpha))
}

/// Number of active producers in the linear-cost equilibrium, given the full
/// ascending cost list and, implicitly, its population.
pub fn linear_active_count(sorted_costs: &[f64]) -> Result<usize, SolveError> {
    check_sorted(sorted_costs)?;
    if sorted_costs.len() < 2 {
        return Err(SolveError::TooFewProducers { need: 2, have: sorted_costs.len() });
    }
    Ok(linear_active_scan(sorted_costs, sorted_costs.len())
        .expect("a full cost list always decides the active count"))
}

/// Scan for the active count using only the `k` smallest costs out of a
/// population of `population`. Walking i = 2, 3, …, the first i producers are
/// exactly the active set once their average cost against i−1 no longer
/// exceeds the next producer's cost. Returns `None` when the prefix is too
/// short to decide — the trigger, if any, lies beyond it.
pub(crate) fn linear_active_scan(sorted_prefix: &[f64], population: usize) -> Option<usize> {
    let k = sorted_prefix.len();
    debug_assert!(k <= population);
    let top = (k - 1).min(population - 1);
    let mut sum = sorted_prefix.first().copied().unwrap_or(0.0);
    for i in 2..=top {
        sum += sorted_prefix[i - 1];
        if sum / (i - 1) as f64 <= sorted_prefix[i] {
            return Some(i);
        }
    }
    if k >= population {
        Some(population)
    } else {
        None
    }
}

/// Proportional-equilibrium aggregate for linear costs, ascending order.
pub fn linear_equilibrium_total(sorted_costs: &[f64], budget: f64) -> Result<f64, SolveError> {
    check_budget(budget)?;
    let l = linear_active_count(sorted_costs)?;
    let active_sum: f64 = sorted_costs[..l].iter().sum();
    Ok(budget * (l - 1) as f64 / active_sum)
}

/// Ratio of first-best to equilibrium totals for linear costs, ascending
/// order: Σ_{i≤l} cᵢ / (c₁·(l−1)). Budget-free.
pub fn linear_anarchy(sorted_costs: &[f64]) -> Result<f64, SolveError> {
    let l = linear_active_count(sorted_costs)?;
    let active_sum: f64 = sorted_costs[..l].iter().sum();
    Ok(active_sum / (sorted_costs[0] * (l - 1) as f64))
}

/// Full closed-form equilibrium for an all-linear profile, in the profile's
/// original producer order.
pub fn equilibrium_closed_form_linear(
    profile: &CostProfile,
) -> Result<EquilibriumSolution, SolveError> {
    if !profile.all_linear() {
        return Err(SolveError::NotAllLinear);
    }
    let n = profile.len();
    if n < 2 {
        return Err(SolveError::TooFewProducers { need: 2, have: n });
    }
    let coefs: Vec<f64> = profile
        .costs()
        .iter()
        .map(|c| c.linear_coefficient().expect("checked all_linear"))
        .collect();
    // Stable sort keeps the lowest original index first among equal costs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| coefs[a].total_cmp(&coefs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| coefs[i]).collect();

    let l = linear_active_count(&sorted)?;
    let active_sum: f64 = sorted[..l].iter().sum();
    let m = profile.budget();
    let s_bar = m * (l - 1) as f64 / active_sum;

    let mut production = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate().take(l) {
        debug_assert_eq!(sorted[rank], coefs[idx]);
        production[idx] = s_bar * (1.0 - coefs[idx] * s_bar / m);
    }
    let shares: Vec<f64> = production.iter().map(|x| x / s_bar).collect();
    let mut active: Vec<usize> = order[..l].to_vec();
    active.sort_unstable();
    Ok(EquilibriumSolution { production, total: s_bar, shares, active })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::CostFunction;
    use crate::schemes::solve_proportional;

    #[test]
    fn power_totals_match_the_two_square_example() {
        let c = [1.0, 1.0];
        assert!((power_normative_total(&c, 2.0, 1.0).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((power_piece_rate_total(&c, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((power_piece_rate_multiplier(&c, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn piece_rate_total_scales_the_first_best_by_alpha_to_the_inverse_alpha() {
        let c = [0.5, 2.0, 7.0];
        for &alpha in &[1.5, 2.0, 3.3] {
            let s_star = power_normative_total(&c, alpha, 4.0).unwrap();
            let s_hat = power_piece_rate_total(&c, alpha, 4.0).unwrap();
            assert!((s_hat * alpha.powf(1.0 / alpha) - s_star).abs() < 1e-12 * s_star);
        }
    }

    #[test]
    fn identical_shortcuts_match_the_general_formulas() {
        let (c, n, m) = (1.7, 23, 2.5);
        for &alpha in &[1.4, 2.0, 3.0] {
            let coefs = vec![c; n];
            let a = identical_power_normative_total(c, alpha, n, m).unwrap();
            let b = power_normative_total(&coefs, alpha, m).unwrap();
            assert!((a - b).abs() < 1e-12 * b, "alpha {alpha}: {a} vs {b}");
            let a = identical_power_piece_rate_total(c, alpha, n, m).unwrap();
            let b = power_piece_rate_total(&coefs, alpha, m).unwrap();
            assert!((a - b).abs() < 1e-12 * b);
        }
        // α = 1: first-best spends everything at marginal cost c.
        assert_eq!(identical_power_normative_total(2.0, 1.0, 5, 3.0).unwrap(), 1.5);
        assert!(identical_power_piece_rate_total(2.0, 1.0, 5, 3.0).is_err());
    }

    #[test]
    fn symmetric_equilibrium_examples() {
        // Three unit squares, M = 1: aggregate 1.
        assert!((symmetric_power_equilibrium_total(1.0, 2.0, 3, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // α = 1 reduces to the linear ladder with identical costs.
        let linear_pair = symmetric_power_equilibrium_total(1.0, 1.0, 2, 1.0).unwrap();
        assert!((linear_pair - 0.5).abs() < 1e-15);
    }

    #[test]
    fn active_count_scans() {
        assert_eq!(linear_active_count(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2);
        assert_eq!(linear_active_count(&[2.0, 2.0, 2.0]).unwrap(), 3);
        assert_eq!(linear_active_count(&[1.0, 1.0]).unwrap(), 2);
        assert_eq!(linear_active_count(&[1.0, 10.0]).unwrap(), 2);
        // A long flat tail keeps everyone in.
        assert_eq!(linear_active_count(&[1.0; 50]).unwrap(), 50);
    }

    #[test]
    fn prefix_scan_reports_undecided_when_too_short() {
        // Prefix of 3 out of 10: no trigger within it, so the count is open.
        assert_eq!(linear_active_scan(&[2.0, 2.0, 2.0], 10), None);
        // Same prefix, trigger inside: decided regardless of population.
        assert_eq!(linear_active_scan(&[1.0, 2.0, 3.5], 10), Some(2));
        // Full population: decided at the population size.
        assert_eq!(linear_active_scan(&[2.0, 2.0, 2.0], 3), Some(3));
    }

    #[test]
    fn linear_aggregate_and_anarchy() {
        let c = [1.0, 2.0, 3.0, 4.0];
        assert!((linear_equilibrium_total(&c, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((linear_anarchy(&c).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_equilibrium_matches_the_solver_and_restores_order() {
        // Shuffled costs; the closed form must undo its internal sort.
        let p = CostProfile::new(
            vec![
                CostFunction::linear(3.0).unwrap(),
                CostFunction::linear(1.0).unwrap(),
                CostFunction::linear(4.0).unwrap(),
                CostFunction::linear(2.0).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        let exact = equilibrium_closed_form_linear(&p).unwrap();
        let numeric = solve_proportional(&p).unwrap();
        assert!((exact.total - numeric.total).abs() < 1e-10);
        for (a, b) in exact.production.iter().zip(&numeric.production) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert_eq!(exact.active, vec![1, 3]);
        assert!((exact.production[1] - 2.0 / 9.0).abs() < 1e-12);
        assert!((exact.production[3] - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_closed_form_inputs() {
        assert!(power_normative_total(&[], 2.0, 1.0).is_err());
        assert!(power_normative_total(&[1.0], 1.0, 1.0).is_err());
        assert!(power_normative_total(&[1.0], 2.0, 0.0).is_err());
        assert!(linear_active_count(&[2.0, 1.0]).is_err());
        assert!(linear_active_count(&[1.0]).is_err());
        assert!(symmetric_power_equilibrium_total(1.0, 2.0, 1, 1.0).is_err());

        let mixed = CostProfile::new(
            vec![CostFunction::linear(1.0).unwrap(), CostFunction::power(1.0, 2.0).unwrap()],
            1.0,
        )
        .unwrap();
        assert!(matches!(
            equilibrium_closed_form_linear(&mixed),
            Err(SolveError::NotAllLinear)
        ));
    }
}
