//! Shared helpers for the integration suites: seeded generators, random
//! profile builders, and a grid-search cost oracle that relies only on the
//! primal production-function definitions.

// Each integration test target compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use contest::cost_model::CostProfile;
use contest::CostFunction;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Random profile of power producers sharing one exponent; returns the
/// profile together with its coefficients and the exponent.
pub fn random_power_profile(rng: &mut ChaCha8Rng) -> (CostProfile, Vec<f64>, f64) {
    let n = rng.random_range(2..=200);
    let alpha = rng.random_range(1.1..=4.0);
    let coefficients: Vec<f64> = (0..n).map(|_| log_uniform(rng, 0.5, 10.0)).collect();
    let budget = log_uniform(rng, 0.1, 10.0);
    let costs = coefficients
        .iter()
        .map(|&c| CostFunction::power(c, alpha).expect("valid power cost"))
        .collect();
    (CostProfile::new(costs, budget).expect("valid profile"), coefficients, alpha)
}

/// Random all-linear profile with up to `max_n` producers.
pub fn random_linear_profile(rng: &mut ChaCha8Rng, max_n: usize) -> CostProfile {
    let n = rng.random_range(2..=max_n);
    let costs = (0..n)
        .map(|_| CostFunction::linear(log_uniform(rng, 0.1, 10.0)).expect("valid linear cost"))
        .collect();
    CostProfile::new(costs, log_uniform(rng, 0.5, 4.0)).expect("valid profile")
}

/// Random profile mixing linear producers and power producers with
/// heterogeneous exponents.
pub fn random_mixed_profile(rng: &mut ChaCha8Rng) -> CostProfile {
    let n = rng.random_range(2..=8);
    let costs = (0..n)
        .map(|_| {
            let c = log_uniform(rng, 0.3, 4.0);
            if rng.random_bool(0.3) {
                CostFunction::linear(c).expect("valid linear cost")
            } else {
                let alpha = rng.random_range(1.2..=3.5);
                CostFunction::power(c, alpha).expect("valid power cost")
            }
        })
        .collect();
    CostProfile::new(costs, log_uniform(rng, 0.5, 4.0)).expect("valid profile")
}

/// Cheapest input bill producing `target` units under the production
/// function `output` (homogeneous of degree `homogeneity`), found by a
/// zooming grid search over input directions with exact radial scaling.
///
/// Search space: directions (1, e^{r_2}, …, e^{r_k}); each candidate is
/// scaled onto the isoquant through homogeneity, so feasibility is exact
/// and only the direction is approximated.
pub fn grid_min_cost(
    output: &dyn Fn(&[f64]) -> f64,
    homogeneity: f64,
    prices: &[f64],
    target: f64,
) -> f64 {
    let k = prices.len();
    let cost_of = |direction: &[f64]| -> f64 {
        let level = output(direction);
        if level <= 0.0 {
            return f64::INFINITY;
        }
        let radius = (target / level).powf(1.0 / homogeneity);
        radius * direction.iter().zip(prices).map(|(u, p)| u * p).sum::<f64>()
    };
    if k == 1 {
        return cost_of(&[1.0]);
    }

    const STEPS: usize = 16;
    const ROUNDS: usize = 9;
    let mut lo = vec![-20.0f64; k - 1];
    let mut hi = vec![20.0f64; k - 1];
    let mut best = f64::INFINITY;
    for _ in 0..ROUNDS {
        let cells = STEPS.pow((k - 1) as u32);
        let mut best_ratios = vec![0usize; k - 1];
        let mut round_best = f64::INFINITY;
        for flat in 0..cells {
            let mut rem = flat;
            let mut direction = vec![1.0; k];
            let mut ratios = vec![0usize; k - 1];
            for d in 0..k - 1 {
                let idx = rem % STEPS;
                rem /= STEPS;
                ratios[d] = idx;
                let r = lo[d] + (hi[d] - lo[d]) * idx as f64 / (STEPS - 1) as f64;
                direction[d + 1] = r.exp();
            }
            let cost = cost_of(&direction);
            if cost < round_best {
                round_best = cost;
                best_ratios = ratios;
            }
        }
        best = best.min(round_best);
        // Zoom each ratio onto one grid cell either side of this round's best.
        for d in 0..k - 1 {
            let width = hi[d] - lo[d];
            let center = lo[d] + width * best_ratios[d] as f64 / (STEPS - 1) as f64;
            let cell = width / (STEPS - 1) as f64;
            lo[d] = center - cell;
            hi[d] = center + cell;
        }
    }
    best
}
