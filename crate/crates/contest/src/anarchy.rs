//! Efficiency of the proportional scheme relative to the benchmarks.
//!
//! For a profile with first-best total s*, piece-rate total ŝ, and
//! equilibrium total s̄, the two efficiency ratios are A = s*/s̄ and
//! A′ = ŝ/s̄ (the latter only when a piece rate exists, i.e. no producer has
//! constant marginal cost). The dissipation D is the budget fraction burned
//! as production cost at equilibrium, Σφᵢ(x̄ᵢ)/M.
//!
//! Identical power producers admit exact expressions — A = (αn/(n−1))^{1/α},
//! A′ = (n/(n−1))^{1/α}, D = (n−1)/(nα) — whose large-n limits are α^{1/α},
//! 1, and 1/α. Over all α the asymptotic ratio never exceeds e^{1/e}. For
//! linear costs with ascending coefficients c₁ ≤ c₂ ≤ …, the ratio is pinned
//! between the cheapest-pair ratio and twice it, and by the population mean:
//! c₂/c₁ < A ≤ 2c₂/c₁ and A ≤ Σcᵢ/((n−1)c₁).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostModelError, CostProfile};
use crate::schemes::{
    solve_normative, solve_piece_rate, solve_proportional, SolveError,
};

/// sup over α ≥ 1 of the large-population efficiency ratio: e^{1/e}.
pub const UNIVERSAL_ANARCHY_LIMIT: f64 = 1.444_667_861_009_766;

/// Relative slack applied when evaluating the analytic bounds numerically.
pub const BOUND_SLACK: f64 = 1e-9;

/// Totals, ratios, and bound diagnostics for one profile.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnarchyReport {
    /// First-best total s*.
    pub s_star: f64,
    /// Piece-rate total ŝ; absent when any producer has linear cost.
    pub s_hat: Option<f64>,
    /// Proportional-equilibrium total s̄.
    pub s_bar: f64,
    /// A = s*/s̄.
    pub anarchy: f64,
    /// A′ = ŝ/s̄ when ŝ exists.
    pub anarchy_prime: Option<f64>,
    /// D = Σφᵢ(x̄ᵢ)/M.
    pub dissipation: f64,
    /// Producers active at equilibrium.
    pub active_count: usize,
    /// Named analytic bounds evaluated on this profile (with slack
    /// [`BOUND_SLACK`]); only the bounds applicable to the profile's cost
    /// family appear.
    pub bound_checks: BTreeMap<String, bool>,
}

/// Solves all applicable schemes for `profile` and assembles the ratios,
/// dissipation, and bound checks.
pub fn report(profile: &CostProfile) -> Result<AnarchyReport, SolveError> {
    let s_star = solve_normative(profile)?.total;
    let s_hat = if profile.has_linear() {
        None
    } else {
        Some(solve_piece_rate(profile)?.total)
    };
    let eq = solve_proportional(profile)?;
    let s_bar = eq.total;
    let anarchy = s_star / s_bar;
    let dissipation = dissipation(profile, &eq.production);

    let mut bound_checks = BTreeMap::new();
    if profile.all_linear() {
        let mut sorted: Vec<f64> = profile
            .costs()
            .iter()
            .map(|c| c.linear_coefficient().expect("all_linear"))
            .collect();
        sorted.sort_unstable_by(f64::total_cmp);
        bound_checks.extend(check_bounds_linear(&sorted, anarchy));
    }
    if let Some(alpha) = profile.common_power_exponent() {
        let n = profile.len() as f64;
        let cap = (n - 1.0) / (n * alpha);
        bound_checks.insert(
            "dissipation_within_power_bound".to_string(),
            dissipation <= cap * (1.0 + BOUND_SLACK) + f64::EPSILON,
        );
    }

    Ok(AnarchyReport {
        s_star,
        s_hat,
        s_bar,
        anarchy,
        anarchy_prime: s_hat.map(|s| s / s_bar),
        dissipation,
        active_count: eq.active.len(),
        bound_checks,
    })
}

/// Budget fraction burned as production cost: Σφᵢ(xᵢ)/M.
pub fn dissipation(profile: &CostProfile, production: &[f64]) -> f64 {
    assert_eq!(production.len(), profile.len(), "production length must match the profile");
    let spent: f64 =
        profile.costs().iter().zip(production).map(|(c, &x)| c.value_at(x)).sum();
    spent / profile.budget()
}

/// Evaluates the linear-cost bounds on the efficiency ratio given the
/// ascending cost coefficients. Keys:
///
/// * `anarchy_exceeds_cost_ratio` — c₂/c₁ < A
/// * `anarchy_within_twice_cost_ratio` — A ≤ 2·c₂/c₁
/// * `anarchy_within_mean_cost_ratio` — A ≤ Σcᵢ/((n−1)·c₁)
pub fn check_bounds_linear(sorted_costs: &[f64], anarchy: f64) -> BTreeMap<String, bool> {
    assert!(sorted_costs.len() >= 2, "bounds need at least two producers");
    debug_assert!(sorted_costs.windows(2).all(|w| w[0] <= w[1]));
    let ratio = sorted_costs[1] / sorted_costs[0];
    let mean_ratio = sorted_costs.iter().sum::<f64>()
        / ((sorted_costs.len() - 1) as f64 * sorted_costs[0]);
    let mut checks = BTreeMap::new();
    checks.insert(
        "anarchy_exceeds_cost_ratio".to_string(),
        anarchy > ratio * (1.0 - BOUND_SLACK),
    );
    checks.insert(
        "anarchy_within_twice_cost_ratio".to_string(),
        anarchy <= 2.0 * ratio * (1.0 + BOUND_SLACK),
    );
    checks.insert(
        "anarchy_within_mean_cost_ratio".to_string(),
        anarchy <= mean_ratio * (1.0 + BOUND_SLACK),
    );
    checks
}

/// Efficiency ratio for n identical producers with cost c·x^α:
/// (αn/(n−1))^{1/α}.
pub fn identical_power_anarchy(alpha: f64, n: usize) -> Result<f64, SolveError> {
    check_identical_args(alpha, n)?;
    let n = n as f64;
    Ok((alpha * n / (n - 1.0)).powf(1.0 / alpha))
}

/// Piece-rate efficiency ratio for n identical power producers:
/// (n/(n−1))^{1/α}. Needs α > 1 for the piece rate to exist.
pub fn identical_power_anarchy_prime(alpha: f64, n: usize) -> Result<f64, SolveError> {
    check_identical_args(alpha, n)?;
    if alpha <= 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "a common exponent above 1" });
    }
    let n = n as f64;
    Ok((n / (n - 1.0)).powf(1.0 / alpha))
}

/// Dissipation for n identical power producers: exactly (n−1)/(nα).
pub fn identical_power_dissipation(alpha: f64, n: usize) -> Result<f64, SolveError> {
    check_identical_args(alpha, n)?;
    Ok((n - 1) as f64 / (n as f64 * alpha))
}

/// Large-population limits (ratio, dissipation) for identical power
/// producers with exponent α: (α^{1/α}, 1/α).
pub fn asymptotic_targets(alpha: f64) -> Result<(f64, f64), CostModelError> {
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(CostModelError::BadParameter {
            what: "cost exponent",
            requirement: "finite and at least 1",
            value: alpha,
        });
    }
    Ok((alpha.powf(1.0 / alpha), 1.0 / alpha))
}

fn check_identical_args(alpha: f64, n: usize) -> Result<(), SolveError> {
    if n < 2 {
        return Err(SolveError::TooFewProducers { need: 2, have: n });
    }
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(SolveError::ClosedFormDomain { requirement: "an exponent of at least 1" });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::CostFunction;

    fn power(c: f64, a: f64) -> CostFunction {
        CostFunction::power(c, a).unwrap()
    }

    fn linear(c: f64) -> CostFunction {
        CostFunction::linear(c).unwrap()
    }

    #[test]
    fn two_identical_squares_report() {
        let p = CostProfile::identical(power(1.0, 2.0), 2, 1.0).unwrap();
        let r = report(&p).unwrap();
        assert!((r.s_star - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((r.s_hat.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.s_bar - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.anarchy - 2.0).abs() < 1e-11);
        assert!((r.anarchy_prime.unwrap() - 2.0f64.sqrt()).abs() < 1e-11);
        assert!((r.dissipation - 0.25).abs() < 1e-12);
        assert_eq!(r.active_count, 2);
        assert_eq!(r.bound_checks.get("dissipation_within_power_bound"), Some(&true));
    }

    #[test]
    fn linear_ladder_report_and_bounds() {
        let p = CostProfile::new(
            vec![linear(1.0), linear(2.0), linear(3.0), linear(4.0)],
            1.0,
        )
        .unwrap();
        let r = report(&p).unwrap();
        assert!(r.s_hat.is_none());
        assert!(r.anarchy_prime.is_none());
        assert!((r.anarchy - 3.0).abs() < 1e-10);
        assert!((r.dissipation - 4.0 / 9.0).abs() < 1e-10);
        assert_eq!(r.active_count, 2);
        for (name, ok) in &r.bound_checks {
            assert!(ok, "bound {name} failed");
        }
        assert_eq!(r.bound_checks.len(), 4);
    }

    #[test]
    fn identical_closed_forms_match_the_solvers() {
        let n = 10;
        let alpha = 2.0;
        let p = CostProfile::identical(power(1.0, alpha), n, 1.0).unwrap();
        let r = report(&p).unwrap();
        let a = identical_power_anarchy(alpha, n).unwrap();
        let ap = identical_power_anarchy_prime(alpha, n).unwrap();
        let d = identical_power_dissipation(alpha, n).unwrap();
        assert!((r.anarchy - a).abs() < 1e-9 * a);
        assert!((r.anarchy_prime.unwrap() - ap).abs() < 1e-9 * ap);
        assert!((r.dissipation - d).abs() < 1e-9);
    }

    #[test]
    fn asymptotics() {
        let (a, d) = asymptotic_targets(2.0).unwrap();
        assert!((a - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((d - 0.5).abs() < 1e-15);
        // The limit ratio peaks at e^{1/e} over all exponents.
        for k in 0..400 {
            let alpha = 1.0 + k as f64 * 0.025;
            let (limit, _) = asymptotic_targets(alpha).unwrap();
            assert!(limit <= UNIVERSAL_ANARCHY_LIMIT + 1e-12);
        }
        // The finite-n ratio decreases toward its limit.
        let mut last = f64::INFINITY;
        for &n in &[2usize, 4, 16, 256, 65536] {
            let a_n = identical_power_anarchy(3.0, n).unwrap();
            assert!(a_n < last);
            last = a_n;
        }
        assert!((last - 3.0f64.powf(1.0 / 3.0)).abs() < 1e-4);
    }

    #[test]
    fn dissipation_is_cost_over_budget() {
        let p = CostProfile::new(vec![power(2.0, 2.0), power(1.0, 2.0)], 4.0).unwrap();
        // Production (1, 1): costs 2 + 1 = 3 out of budget 4.
        assert!((dissipation(&p, &[1.0, 1.0]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bound_arguments_are_validated() {
        assert!(identical_power_anarchy(2.0, 1).is_err());
        assert!(identical_power_anarchy(0.5, 5).is_err());
        assert!(identical_power_anarchy_prime(1.0, 5).is_err());
        assert!(asymptotic_targets(0.9).is_err());
    }

    #[test]
    fn report_serializes_round_trip() {
        let p = CostProfile::identical(power(1.0, 2.0), 3, 1.0).unwrap();
        let r = report(&p).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AnarchyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.active_count, 3);
        assert!((back.anarchy - r.anarchy).abs() < 1e-15);
    }
}
