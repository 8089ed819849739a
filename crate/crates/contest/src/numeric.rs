//! Bracketed scalar root finding shared by the scheme solvers.
//!
//! Every equation the solvers face is monotone in a single positive unknown
//! (a marginal cost, a piece rate, or the aggregate output), so the whole
//! numeric layer is: find a sign change by geometric search, then bisect.
//! Bisection is immune to the flat spots and infinities that linear producers
//! introduce, which ruled out plain Newton at this level.

/// Relative bracket width at which outer bisections stop. Effectively machine
/// precision; the iteration cap is what actually bounds the work.
pub(crate) const OUTER_REL_TOL: f64 = 1e-15;

/// Iteration cap for outer bisections.
pub(crate) const OUTER_MAX_ITER: u32 = 200;

/// Cap on doublings/halvings while searching for a sign change.
pub(crate) const MAX_GROWTH_STEPS: u32 = 128;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Geometric search failed to produce a sign change within the step cap.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NoBracket {
    pub last: Bracket,
}

/// Finds `[lo, hi]` with `g(lo) <= 0 <= g(hi)` for a nondecreasing `g` by
/// walking geometrically from `start > 0`. Infinite values of `g` are fine;
/// they just decide the walking direction.
pub(crate) fn bracket_increasing<F: Fn(f64) -> f64>(
    g: &F,
    start: f64,
    max_steps: u32,
) -> Result<Bracket, NoBracket> {
    debug_assert!(start > 0.0 && start.is_finite());
    let g0 = g(start);
    if g0 == 0.0 {
        return Ok(Bracket { lo: start, hi: start });
    }
    let mut probe = start;
    if g0 < 0.0 {
        for _ in 0..max_steps {
            let next = probe * 2.0;
            if g(next) >= 0.0 {
                return Ok(Bracket { lo: probe, hi: next });
            }
            probe = next;
        }
        Err(NoBracket { last: Bracket { lo: start, hi: probe } })
    } else {
        for _ in 0..max_steps {
            let next = probe * 0.5;
            if g(next) <= 0.0 {
                return Ok(Bracket { lo: next, hi: probe });
            }
            probe = next;
        }
        Err(NoBracket { last: Bracket { lo: probe, hi: start } })
    }
}

/// Bisects a nondecreasing `g` over a valid bracket. Stops at `rel_tol`
/// relative width, at `max_iter` evaluations, or when no representable
/// midpoint remains, and returns the bracket midpoint.
pub(crate) fn bisect_increasing<F: Fn(f64) -> f64>(
    g: &F,
    bracket: Bracket,
    rel_tol: f64,
    max_iter: u32,
) -> f64 {
    let Bracket { mut lo, mut hi } = bracket;
    if lo == hi {
        return lo;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if hi - lo <= rel_tol * mid.abs() {
            return mid;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
