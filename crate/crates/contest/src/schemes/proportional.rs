//! Nash equilibrium of the proportional scheme: producer i receives the
//! budget times x_i/Σx_j and pays φ_i(x_i), with a zero aggregate paying
//! everyone nothing.
//!
//! The solver works through *replacement outputs*: given a hypothetical
//! aggregate s, z̄_i(s) is the output producer i would choose if the aggregate
//! were held at s — the root of s²φ′(z) = M(s − z), or 0 once s·φ′(0) ≥ M.
//! Each share z̄_i(s)/s falls strictly in s, so the equilibrium aggregate is
//! the unique root of Σ z̄_i(s)/s = 1 and everything reduces to nested
//! one-dimensional solves. Linear and quadratic costs invert in closed form;
//! other powers use a safeguarded Newton iteration, and generic costs fall
//! back to bisection.

use crate::cost_model::{CostFunction, CostProfile};
use crate::numeric::{
    bisect_increasing, bracket_increasing, Bracket, MAX_GROWTH_STEPS, OUTER_MAX_ITER,
    OUTER_REL_TOL,
};
use crate::schemes::{EquilibriumSolution, SolveError};

/// Relative tolerance for the inner replacement solves (scaled by the root).
const INNER_REL_TOL: f64 = 1e-14;
/// Iteration cap for the inner Newton/bisection loops.
const INNER_MAX_ITER: u32 = 200;

/// Replacement output z̄(s): what this producer would supply against a fixed
/// aggregate s under budget `m`. Zero exactly when s·φ′(0) ≥ m.
pub(crate) fn replacement(cost: &CostFunction, s: f64, m: f64) -> f64 {
    debug_assert!(s > 0.0 && m > 0.0);
    if s * cost.marginal_at(0.0) >= m {
        return 0.0;
    }
    if let Some(c) = cost.linear_coefficient() {
        // s²c = m(s − z)  ⇒  z = s(1 − cs/m), positive since cs < m here.
        return s - c * s * s / m;
    }
    match cost {
        CostFunction::Power { coefficient, exponent } => {
            if *exponent == 2.0 {
                // s²·2cz = m(s − z)  ⇒  z = ms/(m + 2cs²).
                m * s / (m + 2.0 * coefficient * s * s)
            } else {
                power_replacement(*coefficient, *exponent, s, m)
            }
        }
        CostFunction::Linear { .. } => unreachable!("handled above"),
        CostFunction::GenericSmooth { .. } => {
            let g = |z: f64| s * s * cost.marginal_at(z) - m * (s - z);
            bisect_increasing(&g, Bracket { lo: 0.0, hi: s }, INNER_REL_TOL, INNER_MAX_ITER)
        }
    }
}

/// Root of h(z) = s²αc·z^{α−1} + mz − ms on (0, min(s, ẑ)], where
/// ẑ = (m/(αcs))^{1/(α−1)} caps the power term at ms. Newton steps are kept
/// inside the shrinking sign bracket, falling back to its midpoint.
fn power_replacement(c: f64, alpha: f64, s: f64, m: f64) -> f64 {
    let k = s * s * alpha * c;
    let h = |z: f64| k * z.powf(alpha - 1.0) + m * z - m * s;
    let z_hat = (m / (alpha * c * s)).powf(1.0 / (alpha - 1.0));
    let mut lo = 0.0f64;
    let mut hi = s.min(z_hat);
    let mut z = 0.5 * hi;
    for _ in 0..INNER_MAX_ITER {
        let hz = h(z);
        if hz == 0.0 {
            return z;
        }
        if hz > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let slope = k * (alpha - 1.0) * z.powf(alpha - 2.0) + m;
        let mut next = z - hz / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= INNER_REL_TOL * z {
            return next;
        }
        z = next;
    }
    z
}

/// Computes the unique Nash equilibrium of the proportional scheme.
/// Needs at least two producers; with one, the scheme degenerates (the sole
/// producer would take the whole budget at vanishing output).
pub fn solve_proportional(profile: &CostProfile) -> Result<EquilibriumSolution, SolveError> {
    let n = profile.len();
    if n < 2 {
        return Err(SolveError::TooFewProducers { need: 2, have: n });
    }
    let m = profile.budget();
    let g = |s: f64| -> f64 {
        1.0 - profile.costs().iter().map(|c| replacement(c, s, m)).sum::<f64>() / s
    };
    let bracket = bracket_increasing(&g, 1.0, MAX_GROWTH_STEPS).map_err(|failure| {
        SolveError::BracketFailed {
            quantity: "the equilibrium aggregate output",
            lo: failure.last.lo,
            hi: failure.last.hi,
        }
    })?;
    let s_bar = bisect_increasing(&g, bracket, OUTER_REL_TOL, OUTER_MAX_ITER);
    let production: Vec<f64> =
        profile.costs().iter().map(|c| replacement(c, s_bar, m)).collect();
    let shares: Vec<f64> = production.iter().map(|x| x / s_bar).collect();
    let active: Vec<usize> = production
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| (x > 0.0).then_some(i))
        .collect();
    Ok(EquilibriumSolution { production, total: s_bar, shares, active })
}

/// For each producer, the payoff gain available by deviating from
/// `production[i]` to the best point of a geometric grid on [lo, hi] (or to
/// zero output), holding everyone else fixed. At a Nash equilibrium every
/// entry is at most a grid-resolution rounding above zero.
pub fn best_response_gap(
    profile: &CostProfile,
    production: &[f64],
    grid: usize,
    lo: f64,
    hi: f64,
) -> Vec<f64> {
    assert_eq!(production.len(), profile.len(), "production length must match the profile");
    assert!(grid >= 2 && lo > 0.0 && hi > lo, "need a nondegenerate positive grid");
    let m = profile.budget();
    let s: f64 = production.iter().sum();
    let ratio = (hi / lo).powf(1.0 / (grid - 1) as f64);
    profile
        .costs()
        .iter()
        .zip(production)
        .map(|(cost, &played)| {
            let rest = s - played;
            let payoff = |z: f64| {
                let total = z + rest;
                let prize = if total > 0.0 { m * z / total } else { 0.0 };
                prize - cost.value_at(z)
            };
            let mut best = payoff(0.0);
            let mut z = lo;
            for _ in 0..grid {
                best = best.max(payoff(z));
                z *= ratio;
            }
            best - payoff(played)
        })
        .collect()
}
