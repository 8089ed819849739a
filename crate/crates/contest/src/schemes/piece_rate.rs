//! Uniform piece rate: every unit produced is paid μ, with μ chosen so that
//! the producers' price-taking supply spends the budget exactly.
//!
//! Each producer supplies up to the point where marginal cost meets μ, so
//! total payout μ·Σxᵢ(μ) is strictly increasing in μ and the budget-balancing
//! rate is a one-dimensional root. Constant-marginal-cost producers are
//! rejected: their supply jumps from zero to unbounded at μ = c, so no
//! budget-exhausting rate exists in general.

use crate::cost_model::CostProfile;
use crate::numeric::{
    bisect_increasing, bracket_increasing, MAX_GROWTH_STEPS, OUTER_MAX_ITER, OUTER_REL_TOL,
};
use crate::schemes::{invert_marginal, Scheme, SchemeOutcome, SolveError};

/// Solves for the budget-exhausting piece rate. The returned `multiplier` is
/// the rate μ itself; rewards are μ·xᵢ.
pub fn solve_piece_rate(profile: &CostProfile) -> Result<SchemeOutcome, SolveError> {
    if let Some(index) =
        profile.costs().iter().position(|c| c.linear_coefficient().is_some())
    {
        return Err(SolveError::PieceRateNeedsConvexity { index });
    }
    let budget = profile.budget();
    let g = |mu: f64| -> f64 {
        let supply: f64 = profile.costs().iter().map(|c| invert_marginal(c, mu)).sum();
        mu * supply - budget
    };
    let bracket = bracket_increasing(&g, 1.0, MAX_GROWTH_STEPS).map_err(|failure| {
        SolveError::BracketFailed {
            quantity: "the budget-exhausting piece rate",
            lo: failure.last.lo,
            hi: failure.last.hi,
        }
    })?;
    let mu = bisect_increasing(&g, bracket, OUTER_REL_TOL, OUTER_MAX_ITER);
    let production: Vec<f64> =
        profile.costs().iter().map(|c| invert_marginal(c, mu)).collect();
    let rewards: Vec<f64> = production.iter().map(|x| mu * x).collect();
    Ok(SchemeOutcome {
        scheme: Scheme::PieceRate,
        total: production.iter().sum(),
        production,
        rewards,
        multiplier: Some(mu),
    })
}
