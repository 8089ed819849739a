//! Projected gradient-ascent learning in the proportional scheme.
//!
//! All producers repeatedly play the contest, simultaneously nudging their
//! output along their own payoff gradient with a diminishing step η₀/√t and
//! clamping into a strategy box. Time-averaged play converges to the Nash
//! equilibrium when it lies inside the box, and the per-round regret against
//! the best fixed output (measured on a uniform grid) vanishes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_model::CostProfile;
use crate::schemes::EquilibriumSolution;

/// Default number of grid points for the fixed-action regret benchmark.
pub const DEFAULT_REGRET_GRID: usize = 256;

#[derive(Debug, Error)]
pub enum LearningError {
    #[error("strategy box [{lower}, {upper}] must satisfy 0 < lower < upper, both finite")]
    BadBox { lower: f64, upper: f64 },
    #[error("the horizon must be at least 1")]
    ZeroHorizon,
    #[error("learning needs at least 2 producers, got {have}")]
    TooFewProducers { have: usize },
    #[error("{what} must be positive and finite, got {value}")]
    BadParameter { what: &'static str, value: f64 },
    #[error("initial strategy {value} for producer {index} lies outside the box")]
    InitialOutsideBox { index: usize, value: f64 },
    #[error("expected {expected} producers, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Common strategy interval; every play is clamped into it. The positive
/// lower edge keeps the zero-aggregate singularity out of reach.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StrategyBox {
    lower: f64,
    upper: f64,
}

impl StrategyBox {
    pub fn new(lower: f64, upper: f64) -> Result<Self, LearningError> {
        if lower > 0.0 && lower < upper && upper.is_finite() {
            Ok(StrategyBox { lower, upper })
        } else {
            Err(LearningError::BadBox { lower, upper })
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    /// Strictly inside the box (not touching either edge)?
    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

/// Everything one learning run needs. Build with [`LearningConfig::new`] and
/// adjust via the `with_*` methods; defaults are η₀ = box upper edge, initial
/// play at the box midpoint, and a [`DEFAULT_REGRET_GRID`]-point benchmark.
#[derive(Clone, Debug)]
pub struct LearningConfig {
    profile: CostProfile,
    bounds: StrategyBox,
    horizon: usize,
    eta0: f64,
    initial: Vec<f64>,
    regret_grid: usize,
}

impl LearningConfig {
    pub fn new(
        profile: CostProfile,
        bounds: StrategyBox,
        horizon: usize,
    ) -> Result<Self, LearningError> {
        if profile.len() < 2 {
            return Err(LearningError::TooFewProducers { have: profile.len() });
        }
        if horizon == 0 {
            return Err(LearningError::ZeroHorizon);
        }
        let midpoint = 0.5 * (bounds.lower + bounds.upper);
        Ok(LearningConfig {
            initial: vec![midpoint; profile.len()],
            eta0: bounds.upper,
            profile,
            bounds,
            horizon,
            regret_grid: DEFAULT_REGRET_GRID,
        })
    }

    pub fn with_eta0(mut self, eta0: f64) -> Result<Self, LearningError> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(LearningError::BadParameter { what: "step scale", value: eta0 });
        }
        self.eta0 = eta0;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self, LearningError> {
        if initial.len() != self.profile.len() {
            return Err(LearningError::DimensionMismatch {
                expected: self.profile.len(),
                got: initial.len(),
            });
        }
        if let Some((index, &value)) = initial
            .iter()
            .enumerate()
            .find(|(_, &x)| x < self.bounds.lower || x > self.bounds.upper)
        {
            return Err(LearningError::InitialOutsideBox { index, value });
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn with_regret_grid(mut self, points: usize) -> Result<Self, LearningError> {
        if points < 2 {
            return Err(LearningError::BadParameter {
                what: "regret grid size",
                value: points as f64,
            });
        }
        self.regret_grid = points;
        Ok(self)
    }

    pub fn profile(&self) -> &CostProfile {
        &self.profile
    }

    pub fn bounds(&self) -> StrategyBox {
        self.bounds
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn regret_grid(&self) -> usize {
        self.regret_grid
    }

    /// Step size after round t: η₀/√t.
    pub fn step_size(&self, t: usize) -> f64 {
        assert!(t >= 1, "rounds are 1-based");
        self.eta0 / (t as f64).sqrt()
    }

    /// Does the equilibrium sit strictly inside the strategy box? Averaged
    /// play can only converge to it when it does.
    pub fn equilibrium_in_box(&self, equilibrium: &EquilibriumSolution) -> bool {
        equilibrium.production.iter().all(|&x| self.bounds.contains_interior(x))
    }
}

/// Producer i's payoff at a strategy vector: M·xᵢ/Σx − φᵢ(xᵢ), with a zero
/// aggregate paying zero prize.
pub fn payoff(profile: &CostProfile, strategies: &[f64], i: usize) -> f64 {
    assert_eq!(strategies.len(), profile.len());
    let s: f64 = strategies.iter().sum();
    payoff_given(profile, strategies[i], s - strategies[i], i)
}

fn payoff_given(profile: &CostProfile, x: f64, rest: f64, i: usize) -> f64 {
    let s = x + rest;
    let prize = if s > 0.0 { profile.budget() * x / s } else { 0.0 };
    prize - profile.costs()[i].value_at(x)
}

/// ∂/∂xᵢ of producer i's payoff: M(s − xᵢ)/s² − φᵢ′(xᵢ). Requires a positive
/// aggregate.
pub fn payoff_gradient(profile: &CostProfile, strategies: &[f64], i: usize) -> f64 {
    assert_eq!(strategies.len(), profile.len());
    let s: f64 = strategies.iter().sum();
    assert!(s > 0.0, "the payoff gradient needs a positive aggregate");
    let m = profile.budget();
    m * (s - strategies[i]) / (s * s) - profile.costs()[i].marginal_at(strategies[i])
}

/// One simultaneous projected-gradient update with the round-t step size.
pub fn step(config: &LearningConfig, strategies: &[f64], t: usize) -> Vec<f64> {
    step_with(&config.profile, config.bounds, strategies, config.step_size(t))
}

fn step_with(
    profile: &CostProfile,
    bounds: StrategyBox,
    strategies: &[f64],
    eta: f64,
) -> Vec<f64> {
    let s: f64 = strategies.iter().sum();
    let m = profile.budget();
    profile
        .costs()
        .iter()
        .zip(strategies)
        .map(|(cost, &x)| {
            let gradient = m * (s - x) / (s * s) - cost.marginal_at(x);
            bounds.clamp(x + eta * gradient)
        })
        .collect()
}

/// Full history of one learning run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LearningTrace {
    /// Played strategies per round, `strategies[t-1][i]` for round t.
    pub strategies: Vec<Vec<f64>>,
    /// Realized payoffs per round.
    pub payoffs: Vec<Vec<f64>>,
    /// Time-averaged play over the whole horizon.
    pub average: Vec<f64>,
    /// Per-producer total regret against the best fixed grid output.
    pub regret: Vec<f64>,
}

/// Runs the dynamic for the configured horizon. Deterministic: no randomness
/// enters the update.
pub fn run(config: &LearningConfig) -> LearningTrace {
    let profile = &config.profile;
    let n = profile.len();
    let t_max = config.horizon;
    let mut strategies = Vec::with_capacity(t_max);
    let mut payoffs = Vec::with_capacity(t_max);
    let mut x: Vec<f64> = config.initial.iter().map(|&v| config.bounds.clamp(v)).collect();
    for t in 1..=t_max {
        let s: f64 = x.iter().sum();
        let u: Vec<f64> =
            (0..n).map(|i| payoff_given(profile, x[i], s - x[i], i)).collect();
        strategies.push(x.clone());
        payoffs.push(u);
        if t < t_max {
            x = step_with(profile, config.bounds, &x, config.step_size(t));
        }
    }

    let average: Vec<f64> = (0..n)
        .map(|i| strategies.iter().map(|row| row[i]).sum::<f64>() / t_max as f64)
        .collect();

    // Regret against the best fixed output on a uniform grid over the box,
    // holding opponents to their realized play.
    let m = profile.budget();
    let g = config.regret_grid;
    let grid: Vec<f64> = (0..g)
        .map(|k| {
            config.bounds.lower
                + (config.bounds.upper - config.bounds.lower) * k as f64 / (g - 1) as f64
        })
        .collect();
    let totals: Vec<f64> = strategies.iter().map(|row| row.iter().sum()).collect();
    let regret: Vec<f64> = (0..n)
        .map(|i| {
            let rests: Vec<f64> = totals.iter().zip(&strategies).map(|(s, row)| s - row[i]).collect();
            let earned: f64 = payoffs.iter().map(|row| row[i]).sum();
            let cost = &profile.costs()[i];
            let best = grid
                .iter()
                .map(|&z| {
                    let prizes: f64 = rests.iter().map(|&r| m * z / (z + r)).sum();
                    prizes - t_max as f64 * cost.value_at(z)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            best - earned
        })
        .collect();

    LearningTrace { strategies, payoffs, average, regret }
}

/// Sup-norm distance between running-average play and the equilibrium at
/// power-of-two checkpoints (and the final round): `(t, distance)` pairs.
pub fn distance_to_equilibrium(
    trace: &LearningTrace,
    equilibrium: &EquilibriumSolution,
) -> Result<Vec<(usize, f64)>, LearningError> {
    let t_max = trace.strategies.len();
    let n = equilibrium.production.len();
    if t_max == 0 || trace.strategies[0].len() != n {
        return Err(LearningError::DimensionMismatch {
            expected: n,
            got: trace.strategies.first().map_or(0, Vec::len),
        });
    }
    let mut checkpoints: Vec<usize> = std::iter::successors(Some(1usize), |&t| {
        t.checked_mul(2).filter(|&next| next <= t_max)
    })
    .collect();
    if *checkpoints.last().unwrap() != t_max {
        checkpoints.push(t_max);
    }

    let mut sums = vec![0.0f64; n];
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();
    for (t, row) in trace.strategies.iter().enumerate().map(|(k, row)| (k + 1, row)) {
        for (sum, &x) in sums.iter_mut().zip(row) {
            *sum += x;
        }
        if next.peek() == Some(&t) {
            next.next();
            let distance = sums
                .iter()
                .zip(&equilibrium.production)
                .map(|(sum, &eq)| (sum / t as f64 - eq).abs())
                .fold(0.0f64, f64::max);
            out.push((t, distance));
        }
    }
    Ok(out)
}
