//! Monte Carlo experiments over random linear-cost populations.
//!
//! Each producer draws a constant marginal cost c = 1 + ξ with ξ sampled from
//! a configurable nonnegative distribution. For every population size in a
//! grid and every replication, the experiment computes the efficiency ratio
//! A − 1 and the active fraction l/N of the proportional equilibrium —
//! entirely through the linear closed forms, so populations up to the
//! in-memory cap run in milliseconds and larger ones can use the
//! [`streaming`] path.
//!
//! Randomness is fully deterministic: every (seed, grid position,
//! replication) cell owns a counter-derived ChaCha8 substream, so results are
//! independent of the number of worker threads.

pub mod streaming;

mod rng;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schemes::closed_form::linear_active_scan;

/// Default replications per grid point.
pub const DEFAULT_REPLICATIONS: usize = 5;
/// Largest population the in-memory runner accepts.
pub const IN_MEMORY_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{what} must be {requirement}, got {value}")]
    BadParameter { what: &'static str, requirement: &'static str, value: f64 },
    #[error("population grid must be nonempty, strictly increasing, and at least 2 everywhere")]
    BadGrid,
    #[error("population {n} exceeds the in-memory cap of {cap}; use the streaming runner")]
    AboveMemoryCap { n: usize, cap: usize },
    #[error(
        "could not parse distribution {input:?}; expected \"uniform:LO,HI\", \
         \"lognormal:LOC,VAR\", \"pareto:SHAPE,SCALE\", or \"constant:VALUE\""
    )]
    Parse { input: String },
}

/// Distribution of the cost offset ξ in c = 1 + ξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum DistributionSpec {
    /// ξ ~ Uniform(low, high), 0 ≤ low < high.
    Uniform { low: f64, high: f64 },
    /// ξ = exp(location + √variance·Z) with Z standard normal.
    #[serde(rename = "lognormal")]
    LogNormal { location: f64, variance: f64 },
    /// ξ with survival function (scale/(scale + x))^shape on x ≥ 0
    /// (a Pareto tail starting at zero).
    Pareto { shape: f64, scale: f64 },
    /// ξ fixed; handy for exactness tests.
    Constant { value: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |what, requirement, value| {
            Err(ExperimentError::BadParameter { what, requirement, value })
        };
        match *self {
            DistributionSpec::Uniform { low, high } => {
                if !(low >= 0.0 && low.is_finite()) {
                    return bad("uniform low", "nonnegative and finite", low);
                }
                if !(high > low && high.is_finite()) {
                    return bad("uniform high", "finite and above the low end", high);
                }
            }
            DistributionSpec::LogNormal { location, variance } => {
                if !location.is_finite() {
                    return bad("lognormal location", "finite", location);
                }
                if !(variance > 0.0 && variance.is_finite()) {
                    return bad("lognormal variance", "positive and finite", variance);
                }
            }
            DistributionSpec::Pareto { shape, scale } => {
                if !(shape > 0.0 && shape.is_finite()) {
                    return bad("pareto shape", "positive and finite", shape);
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad("pareto scale", "positive and finite", scale);
                }
            }
            DistributionSpec::Constant { value } => {
                if !(value >= 0.0 && value.is_finite()) {
                    return bad("constant offset", "nonnegative and finite", value);
                }
            }
        }
        Ok(())
    }

    /// One draw of ξ. Consumes a fixed number of words per draw (uniform and
    /// pareto 1, lognormal 2, constant 0), keeping streams regenerable.
    fn draw<R: rand_core::RngCore>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Uniform { low, high } => {
                low + (high - low) * rng::unit_uniform(rng)
            }
            DistributionSpec::LogNormal { location, variance } => {
                // Box–Muller, cosine branch only: two words per draw.
                let u1 = 1.0 - rng::unit_uniform(rng); // (0, 1]
                let u2 = rng::unit_uniform(rng);
                let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                (location + variance.sqrt() * z).exp()
            }
            DistributionSpec::Pareto { shape, scale } => {
                // Inverse survival: x = scale·(u^{-1/shape} − 1), u ∈ (0, 1].
                let u = 1.0 - rng::unit_uniform(rng);
                scale * (u.powf(-1.0 / shape) - 1.0)
            }
            DistributionSpec::Constant { value } => value,
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Uniform { low, high } => write!(f, "U({low},{high})"),
            DistributionSpec::LogNormal { location, variance } => {
                write!(f, "LN({location},{variance})")
            }
            DistributionSpec::Pareto { shape, scale } => write!(f, "Pa({shape},{scale})"),
            DistributionSpec::Constant { value } => write!(f, "Const({value})"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = ExperimentError;

    /// Parses `"uniform:1,2"`, `"lognormal:0,1"`, `"pareto:3,1"`, or
    /// `"constant:0.5"` (case-insensitive names, whitespace tolerated).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = || ExperimentError::Parse { input: s.to_string() };
        let (name, args) = s.split_once(':').ok_or_else(parse_err)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err())?;
        let two = |f: fn(f64, f64) -> DistributionSpec| match nums[..] {
            [a, b] => Ok(f(a, b)),
            _ => Err(parse_err()),
        };
        let spec = match name.trim().to_ascii_lowercase().as_str() {
            "uniform" => two(|low, high| DistributionSpec::Uniform { low, high })?,
            "lognormal" => {
                two(|location, variance| DistributionSpec::LogNormal { location, variance })?
            }
            "pareto" => two(|shape, scale| DistributionSpec::Pareto { shape, scale })?,
            "constant" => match nums[..] {
                [value] => DistributionSpec::Constant { value },
                _ => return Err(parse_err()),
            },
            _ => return Err(parse_err()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Configuration of one Monte Carlo experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub distribution: DistributionSpec,
    /// Population sizes, strictly increasing, each at least 2.
    pub n_grid: Vec<usize>,
    pub seed: u64,
    pub replications: usize,
    /// Budget M; the sampled ratios are budget-free but the streaming path
    /// also reports the equilibrium aggregate, which scales with it.
    pub budget: f64,
}

impl ExperimentSpec {
    pub fn new(distribution: DistributionSpec, n_grid: Vec<usize>, seed: u64) -> Self {
        ExperimentSpec {
            distribution,
            n_grid,
            seed,
            replications: DEFAULT_REPLICATIONS,
            budget: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.distribution.validate()?;
        if self.n_grid.is_empty()
            || self.n_grid[0] < 2
            || self.n_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(ExperimentError::BadGrid);
        }
        if self.replications == 0 {
            return Err(ExperimentError::BadParameter {
                what: "replications",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(ExperimentError::BadParameter {
                what: "budget",
                requirement: "positive and finite",
                value: self.budget,
            });
        }
        Ok(())
    }
}

/// One replication at one population size.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Replicate {
    pub n: usize,
    pub replication: usize,
    /// Efficiency ratio minus one, A − 1 ≥ 0.
    pub anarchy_minus_one: f64,
    /// Active producers over population, l/N ∈ (0, 1].
    pub active_fraction: f64,
}

/// Mean/min/max over the replications of one grid point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

fn summarize(values: impl Iterator<Item = f64>) -> Summary {
    let mut count = 0usize;
    let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        count += 1;
        sum += v;
        min = min.min(v);
        max = max.max(v);
    }
    assert!(count > 0, "summaries need at least one replicate");
    Summary { mean: sum / count as f64, min, max }
}

/// All replications for one population size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub seed: u64,
    pub replicates: Vec<Replicate>,
}

impl ExperimentRow {
    pub fn anarchy_summary(&self) -> Summary {
        summarize(self.replicates.iter().map(|r| r.anarchy_minus_one))
    }

    pub fn active_summary(&self) -> Summary {
        summarize(self.replicates.iter().map(|r| r.active_fraction))
    }
}

/// Draws the cost vector c = 1 + ξ for one experiment cell.
pub fn sample_costs(
    distribution: DistributionSpec,
    count: usize,
    seed: u64,
    n_index: u64,
    replication: u64,
) -> Vec<f64> {
    let mut rng = rng::substream(seed, n_index, replication);
    (0..count).map(|_| 1.0 + distribution.draw(&mut rng)).collect()
}

/// The same draws as [`sample_costs`], as a lazy stream for the
/// memory-bounded selection in [`streaming`].
pub fn cost_stream(
    distribution: DistributionSpec,
    count: usize,
    seed: u64,
    n_index: u64,
    replication: u64,
) -> impl Iterator<Item = f64> {
    let mut rng = rng::substream(seed, n_index, replication);
    (0..count).map(move |_| 1.0 + distribution.draw(&mut rng))
}

fn replicate_from_sorted(sorted: &[f64], n: usize, replication: usize) -> Replicate {
    let l = linear_active_scan(sorted, n).expect("full cost list always decides");
    let active_sum: f64 = sorted[..l].iter().sum();
    let anarchy = active_sum / (sorted[0] * (l - 1) as f64);
    Replicate {
        n,
        replication,
        anarchy_minus_one: anarchy - 1.0,
        active_fraction: l as f64 / n as f64,
    }
}

/// Runs the experiment with every population held in memory. Cells are
/// evaluated in parallel but their substreams make the output identical for
/// any thread count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>, ExperimentError> {
    spec.validate()?;
    if let Some(&n) = spec.n_grid.iter().find(|&&n| n > IN_MEMORY_CAP) {
        return Err(ExperimentError::AboveMemoryCap { n, cap: IN_MEMORY_CAP });
    }
    let cells: Vec<(usize, usize)> = spec
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(ni, _)| (0..spec.replications).map(move |rep| (ni, rep)))
        .collect();
    let replicates: Vec<Replicate> = cells
        .par_iter()
        .map(|&(ni, rep)| {
            let n = spec.n_grid[ni];
            let mut costs =
                sample_costs(spec.distribution, n, spec.seed, ni as u64, rep as u64);
            costs.sort_unstable_by(f64::total_cmp);
            replicate_from_sorted(&costs, n, rep)
        })
        .collect();
    Ok(collect_rows(spec, replicates))
}

/// Runs the experiment through the bounded-memory selection path; results
/// match [`run_experiment`] exactly. Populations may exceed the in-memory
/// cap. Within one grid point, the active count of the first replication
/// seeds the prefix size for the rest.
pub fn run_experiment_streaming(
    spec: &ExperimentSpec,
) -> Result<Vec<ExperimentRow>, ExperimentError> {
    spec.validate()?;
    let mut replicates = Vec::with_capacity(spec.n_grid.len() * spec.replications);
    for (ni, &n) in spec.n_grid.iter().enumerate() {
        let mut hint = None;
        for rep in 0..spec.replications {
            let summary = streaming::streaming_active_set(
                || cost_stream(spec.distribution, n, spec.seed, ni as u64, rep as u64),
                n,
                spec.budget,
                hint,
            )?;
            hint = Some(summary.active_count);
            replicates.push(Replicate {
                n,
                replication: rep,
                anarchy_minus_one: summary.anarchy - 1.0,
                active_fraction: summary.active_count as f64 / n as f64,
            });
        }
    }
    Ok(collect_rows(spec, replicates))
}

fn collect_rows(spec: &ExperimentSpec, replicates: Vec<Replicate>) -> Vec<ExperimentRow> {
    spec.n_grid
        .iter()
        .zip(replicates.chunks(spec.replications))
        .map(|(&n, chunk)| ExperimentRow { n, seed: spec.seed, replicates: chunk.to_vec() })
        .collect()
}
