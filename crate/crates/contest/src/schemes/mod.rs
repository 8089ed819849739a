//! The three compensation schemes and their solvers.
//!
//! * [`solve_normative`] — first-best total production: maximize Σxᵢ subject
//!   to the budget covering every producer's cost.
//! * [`solve_piece_rate`] — uniform per-unit price chosen so that the
//!   producers' price-taking supply exactly exhausts the budget.
//! * [`solve_proportional`] — Nash equilibrium of the contest in which each
//!   producer receives the budget times their share of total output.
//!
//! All three reduce to one-dimensional root finding in a common "price"
//! variable: a marginal cost level for the first two, the aggregate output
//! for the contest. [`closed_form`] provides independent closed-form answers
//! for power and linear costs, used to cross-check the numeric path.

pub mod closed_form;
mod normative;
mod piece_rate;
mod proportional;

pub use normative::solve_normative;
pub use piece_rate::solve_piece_rate;
pub use proportional::{best_response_gap, solve_proportional};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_model::{CostFunction, CostProfile};

/// Tolerance on |Σ shares − 1| for a solved equilibrium.
pub const SHARE_SUM_TOL: f64 = 1e-10;
/// Relative tolerance on first-order-condition residuals.
pub const FOC_REL_TOL: f64 = 1e-8;

/// Which compensation scheme produced an outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Normative,
    PieceRate,
    Proportional,
}

/// A solved scheme: per-producer production and rewards, their totals, and
/// the scheme's price variable where one exists (the shadow price of budget
/// for the normative scheme, the per-unit price for the piece rate).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub production: Vec<f64>,
    pub total: f64,
    pub rewards: Vec<f64>,
    pub multiplier: Option<f64>,
}

/// Nash equilibrium of the proportional scheme.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    /// Per-producer equilibrium output x̄ᵢ.
    pub production: Vec<f64>,
    /// Aggregate output s̄ = Σ x̄ᵢ.
    pub total: f64,
    /// Output shares x̄ᵢ / s̄; rewards are the budget times these.
    pub shares: Vec<f64>,
    /// Indices of producers with x̄ᵢ > 0, ascending. Always at least two.
    pub active: Vec<usize>,
}

impl EquilibriumSolution {
    /// Repackages the equilibrium as a [`SchemeOutcome`] with rewards
    /// `budget · share`.
    pub fn to_outcome(&self, budget: f64) -> SchemeOutcome {
        SchemeOutcome {
            scheme: Scheme::Proportional,
            production: self.production.clone(),
            total: self.total,
            rewards: self.shares.iter().map(|share| budget * share).collect(),
            multiplier: None,
        }
    }
}

/// An implementable reward rule for the normative benchmark: pay producer i
/// the fixed amount `payments[i]` for producing at least `thresholds[i]`,
/// nothing otherwise. Thresholds sit `epsilons[i]` below the first-best
/// levels, so compliance is strictly profitable while total payments still
/// fit the budget; the induced total can be made arbitrarily close to the
/// first-best total by shrinking the epsilons.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormativeRewardRule {
    pub thresholds: Vec<f64>,
    pub payments: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl NormativeRewardRule {
    /// Total production when every producer best-responds to the rule.
    pub fn induced_total(&self) -> f64 {
        self.thresholds.iter().sum()
    }
}

/// Builds the threshold rule from a solved normative outcome. Each epsilon
/// must lie strictly between 0 and the producer's first-best output, and must
/// be exactly 0 for producers the benchmark leaves idle.
pub fn build_normative_rewards(
    outcome: &SchemeOutcome,
    epsilons: &[f64],
) -> Result<NormativeRewardRule, SolveError> {
    if outcome.scheme != Scheme::Normative {
        return Err(SolveError::WrongScheme { expected: Scheme::Normative, got: outcome.scheme });
    }
    if epsilons.len() != outcome.production.len() {
        return Err(SolveError::LengthMismatch {
            expected: outcome.production.len(),
            got: epsilons.len(),
        });
    }
    let mut thresholds = Vec::with_capacity(epsilons.len());
    for (i, (&x, &eps)) in outcome.production.iter().zip(epsilons).enumerate() {
        let admissible = if x > 0.0 { eps > 0.0 && eps < x } else { eps == 0.0 };
        if !admissible {
            return Err(SolveError::BadEpsilon { index: i, value: eps, limit: x });
        }
        thresholds.push(x - eps);
    }
    Ok(NormativeRewardRule {
        thresholds,
        payments: outcome.rewards.clone(),
        epsilons: epsilons.to_vec(),
    })
}

/// Residuals of the equilibrium conditions at a candidate production vector.
#[derive(Clone, Copy, Debug)]
pub struct EquilibriumCheck {
    /// |Σ xᵢ/s − 1|.
    pub share_sum_error: f64,
    /// Largest relative first-order-condition residual over active producers.
    pub max_active_residual: f64,
    /// Largest relative shortfall of φᵢ′(0) below the equilibrium price over
    /// inactive producers (0 when every idle producer is correctly idle).
    pub max_inactive_violation: f64,
    pub active_count: usize,
}

impl EquilibriumCheck {
    /// All residuals within the module tolerances?
    pub fn passes(&self) -> bool {
        self.share_sum_error <= SHARE_SUM_TOL
            && self.max_active_residual <= FOC_REL_TOL
            && self.max_inactive_violation <= FOC_REL_TOL
    }
}

/// Evaluates the proportional-scheme equilibrium conditions at `production`:
/// active producers must satisfy φᵢ′(xᵢ) = M(s − xᵢ)/s², idle ones must have
/// φᵢ′(0) ≥ M/s.
pub fn check_equilibrium(profile: &CostProfile, production: &[f64]) -> EquilibriumCheck {
    assert_eq!(production.len(), profile.len(), "production length must match the profile");
    let m = profile.budget();
    let s: f64 = production.iter().sum();
    let mut share_sum = 0.0;
    let mut max_active = 0.0f64;
    let mut max_inactive = 0.0f64;
    let mut active_count = 0;
    for (cost, &x) in profile.costs().iter().zip(production) {
        share_sum += x / s;
        if x > 0.0 {
            active_count += 1;
            let lhs = cost.marginal_at(x);
            let rhs = m * (s - x) / (s * s);
            let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
            max_active = max_active.max((lhs - rhs).abs() / scale);
        } else {
            let price = m / s;
            let shortfall = (price - cost.marginal_at(0.0)) / price;
            max_inactive = max_inactive.max(shortfall.max(0.0));
        }
    }
    EquilibriumCheck {
        share_sum_error: (share_sum - 1.0).abs(),
        max_active_residual: max_active,
        max_inactive_violation: max_inactive,
        active_count,
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("the scheme needs at least {need} producers, got {have}")]
    TooFewProducers { need: usize, have: usize },
    #[error("the piece rate requires strictly increasing marginal costs; producer {index} has a constant one")]
    PieceRateNeedsConvexity { index: usize },
    #[error("could not bracket {quantity}; last interval tried was [{lo}, {hi}]")]
    BracketFailed { quantity: &'static str, lo: f64, hi: f64 },
    #[error("epsilon {value} for producer {index} must lie strictly inside (0, {limit}) (exactly 0 for idle producers)")]
    BadEpsilon { index: usize, value: f64, limit: f64 },
    #[error("expected a {expected:?} outcome, got {got:?}")]
    WrongScheme { expected: Scheme, got: Scheme },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("this closed form requires every producer to have linear cost")]
    NotAllLinear,
    #[error("closed form requires {requirement}")]
    ClosedFormDomain { requirement: &'static str },
}

/// Output level at which the producer's marginal cost reaches `target`:
/// the price-taking supply. Returns 0 when φ′(0) already meets the target and
/// +∞ for a linear producer whose constant marginal cost lies below it.
pub(crate) fn invert_marginal(cost: &CostFunction, target: f64) -> f64 {
    debug_assert!(target > 0.0);
    if cost.marginal_at(0.0) >= target {
        return 0.0;
    }
    if cost.linear_coefficient().is_some() {
        return f64::INFINITY;
    }
    match cost {
        CostFunction::Power { coefficient, exponent } => {
            (target / (coefficient * exponent)).powf(1.0 / (exponent - 1.0))
        }
        CostFunction::Linear { .. } => unreachable!("handled above"),
        CostFunction::GenericSmooth { .. } => {
            let g = |x: f64| cost.marginal_at(x) - target;
            let mut hi = 1.0f64;
            let mut steps = 0;
            while g(hi) < 0.0 {
                hi *= 2.0;
                steps += 1;
                if steps > crate::numeric::MAX_GROWTH_STEPS {
                    // Marginal cost stays below the target forever: supply is
                    // unbounded, as for a linear producer.
                    return f64::INFINITY;
                }
            }
            let lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
            crate::numeric::bisect_increasing(
                &g,
                crate::numeric::Bracket { lo, hi },
                crate::numeric::OUTER_REL_TOL,
                crate::numeric::OUTER_MAX_ITER,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn invert_marginal_matches_closed_forms() {
        let square = CostFunction::power(1.0, 2.0).unwrap();
        // φ′(x) = 2x, so supply at price 3 is 1.5.
        assert!((invert_marginal(&square, 3.0) - 1.5).abs() < 1e-12);

        let linear = CostFunction::linear(2.0).unwrap();
        assert_eq!(invert_marginal(&linear, 1.0), 0.0);
        assert_eq!(invert_marginal(&linear, 2.0), 0.0);
        assert_eq!(invert_marginal(&linear, 2.5), f64::INFINITY);
    }

    #[test]
    fn invert_marginal_generic_against_power_twin() {
        let generic = CostFunction::generic_smooth(
            Arc::new(|x: f64| 0.7 * x.powf(3.0)),
            Arc::new(|x: f64| 2.1 * x * x),
        )
        .unwrap();
        let twin = CostFunction::power(0.7, 3.0).unwrap();
        for &t in &[0.1, 1.0, 5.0, 40.0] {
            let a = invert_marginal(&generic, t);
            let b = invert_marginal(&twin, t);
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "target {t}: {a} vs {b}");
        }
    }

    #[test]
    fn reward_rule_thresholds_sit_below_first_best() {
        let outcome = SchemeOutcome {
            scheme: Scheme::Normative,
            production: vec![1.0, 0.0],
            total: 1.0,
            rewards: vec![2.0, 0.0],
            multiplier: Some(0.5),
        };
        let rule = build_normative_rewards(&outcome, &[0.25, 0.0]).unwrap();
        assert_eq!(rule.thresholds, vec![0.75, 0.0]);
        assert_eq!(rule.payments, vec![2.0, 0.0]);
        assert!((rule.induced_total() - 0.75).abs() < 1e-15);

        // Idle producers must keep epsilon exactly zero; active ones need
        // epsilon strictly inside (0, x).
        assert!(matches!(
            build_normative_rewards(&outcome, &[0.25, 0.1]),
            Err(SolveError::BadEpsilon { index: 1, .. })
        ));
        assert!(matches!(
            build_normative_rewards(&outcome, &[1.5, 0.0]),
            Err(SolveError::BadEpsilon { index: 0, .. })
        ));
        assert!(matches!(
            build_normative_rewards(&outcome, &[0.25]),
            Err(SolveError::LengthMismatch { .. })
        ));

        let wrong = SchemeOutcome { scheme: Scheme::Proportional, ..outcome };
        assert!(matches!(
            build_normative_rewards(&wrong, &[0.25, 0.0]),
            Err(SolveError::WrongScheme { .. })
        ));
    }

    #[test]
    fn scheme_names_serialize_kebab_case() {
        assert_eq!(serde_json::to_string(&Scheme::PieceRate).unwrap(), "\"piece-rate\"");
        assert_eq!(serde_json::to_string(&Scheme::Normative).unwrap(), "\"normative\"");
        let back: Scheme = serde_json::from_str("\"proportional\"").unwrap();
        assert_eq!(back, Scheme::Proportional);
    }
}
