//! Bounded-memory equilibrium summaries for huge linear populations.
//!
//! Only the l cheapest producers matter for the linear-cost equilibrium, and
//! l/N shrinks as populations grow, so there is no need to materialize all N
//! costs: keep the k smallest seen so far in a max-heap while streaming the
//! population, then run the active-count scan on that sorted prefix. The scan
//! reports whether the prefix already pins down the answer; if not (the
//! active set might extend past the prefix), double k and stream again —
//! substreams are regenerable, so a second pass sees identical draws. Once
//! k ≥ N the pass degenerates to a full sort and always decides.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::experiments::ExperimentError;
use crate::schemes::closed_form::linear_active_scan;

/// Smallest prefix attempted.
pub const STREAM_PREFIX_FLOOR: usize = 1024;

/// Equilibrium summary computed from a streamed population.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StreamingSummary {
    pub n: usize,
    /// Active producers l.
    pub active_count: usize,
    /// Equilibrium aggregate s̄ = M(l−1)/Σ_{i≤l} cᵢ.
    pub s_bar: f64,
    /// Efficiency ratio A = Σ_{i≤l} cᵢ/(c₁(l−1)).
    pub anarchy: f64,
    pub min_cost: f64,
    /// Prefix size that finally decided the active count.
    pub prefix_size: usize,
    /// Number of passes over the stream.
    pub passes: u32,
}

/// Total-order f64 wrapper so costs can live in a `BinaryHeap`.
#[derive(PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The k smallest elements of the stream, ascending.
fn k_smallest(stream: impl Iterator<Item = f64>, k: usize) -> Vec<f64> {
    let mut heap: BinaryHeap<TotalF64> = BinaryHeap::with_capacity(k + 1);
    for x in stream {
        if heap.len() < k {
            heap.push(TotalF64(x));
        } else if let Some(top) = heap.peek() {
            if x < top.0 {
                heap.pop();
                heap.push(TotalF64(x));
            }
        }
    }
    heap.into_sorted_vec().into_iter().map(|t| t.0).collect()
}

/// Computes the linear-cost equilibrium summary for a population of `n`
/// streamed costs without holding more than the deciding prefix in memory.
/// `make_stream` must return the same draws on every call. `active_hint`
/// (e.g. the active count of a sibling replication) sizes the first prefix.
pub fn streaming_active_set<I, F>(
    make_stream: F,
    n: usize,
    budget: f64,
    active_hint: Option<usize>,
) -> Result<StreamingSummary, ExperimentError>
where
    I: Iterator<Item = f64>,
    F: Fn() -> I,
{
    if n < 2 {
        return Err(ExperimentError::BadParameter {
            what: "population",
            requirement: "at least 2",
            value: n as f64,
        });
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(ExperimentError::BadParameter {
            what: "budget",
            requirement: "positive and finite",
            value: budget,
        });
    }
    let mut k = STREAM_PREFIX_FLOOR.max(2 * active_hint.unwrap_or(0)).min(n);
    let mut passes = 0;
    loop {
        passes += 1;
        let prefix = k_smallest(make_stream(), k);
        debug_assert_eq!(prefix.len(), k.min(n));
        if let Some(l) = linear_active_scan(&prefix, n) {
            let active_sum: f64 = prefix[..l].iter().sum();
            let span = (l - 1) as f64;
            return Ok(StreamingSummary {
                n,
                active_count: l,
                s_bar: budget * span / active_sum,
                anarchy: active_sum / (prefix[0] * span),
                min_cost: prefix[0],
                prefix_size: k,
                passes,
            });
        }
        debug_assert!(k < n, "a full prefix always decides");
        k = (k * 2).min(n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{cost_stream, DistributionSpec};
    use crate::schemes::closed_form::{linear_anarchy, linear_equilibrium_total};

    #[test]
    fn matches_the_full_sort_bit_for_bit() {
        let dist = DistributionSpec::LogNormal { location: 0.0, variance: 2.0 };
        for (seed, n) in [(42u64, 5_000usize), (7, 20_000), (11, 100_000)] {
            let summary =
                streaming_active_set(|| cost_stream(dist, n, seed, 0, 0), n, 1.0, None)
                    .unwrap();
            let mut all: Vec<f64> = cost_stream(dist, n, seed, 0, 0).collect();
            all.sort_unstable_by(f64::total_cmp);
            let s_bar = linear_equilibrium_total(&all, 1.0).unwrap();
            let anarchy = linear_anarchy(&all).unwrap();
            assert_eq!(summary.s_bar.to_bits(), s_bar.to_bits(), "seed {seed} n {n}");
            assert_eq!(summary.anarchy.to_bits(), anarchy.to_bits());
            assert_eq!(summary.min_cost.to_bits(), all[0].to_bits());
        }
    }

    #[test]
    fn identical_costs_force_multiple_passes() {
        // No trigger ever fires for identical costs, so the prefix has to
        // grow until it covers the whole population.
        let n = 5000;
        let dist = DistributionSpec::Constant { value: 1.0 };
        let summary =
            streaming_active_set(|| cost_stream(dist, n, 1, 0, 0), n, 1.0, None).unwrap();
        assert_eq!(summary.active_count, n);
        assert!(summary.passes > 1, "passes {}", summary.passes);
        assert_eq!(summary.prefix_size, n);
        let expected = 1.0 * (n - 1) as f64 / (2.0 * n as f64);
        assert!((summary.s_bar - expected).abs() < 1e-12);
    }

    #[test]
    fn a_good_hint_avoids_extra_passes() {
        let n = 5000;
        let dist = DistributionSpec::Constant { value: 1.0 };
        let hinted =
            streaming_active_set(|| cost_stream(dist, n, 1, 0, 0), n, 1.0, Some(n)).unwrap();
        assert_eq!(hinted.passes, 1);
        assert_eq!(hinted.active_count, n);
    }

    #[test]
    fn small_populations_fall_back_to_sorting() {
        let dist = DistributionSpec::Uniform { low: 1.0, high: 2.0 };
        let summary =
            streaming_active_set(|| cost_stream(dist, 10, 3, 0, 0), 10, 2.0, None).unwrap();
        assert_eq!(summary.prefix_size, 10);
        assert_eq!(summary.passes, 1);
        assert!(summary.active_count >= 2);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let dist = DistributionSpec::Constant { value: 1.0 };
        assert!(streaming_active_set(|| cost_stream(dist, 1, 1, 0, 0), 1, 1.0, None).is_err());
        assert!(streaming_active_set(|| cost_stream(dist, 5, 1, 0, 0), 5, 0.0, None).is_err());
    }
}
