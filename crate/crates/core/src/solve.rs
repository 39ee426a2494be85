//! Predicate bisection for the left endpoint of `{x : g(x) ≤ tol_f}` when `g`
//! is non-increasing.

use crate::error::{Error, Result};
use crate::quantile::SolveSettings;

/// Result of a bisection run, including every evaluated point.
#[derive(Debug, Clone)]
pub struct RootTrace {
    pub root: f64,
    pub iterations: usize,
    /// `(x, g(x))` in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Smallest `x ∈ [lo, hi]` with `g(x) ≤ tol_f`, to within `tol_x`.
///
/// `candidates` are points (typically the support of a distribution, shifted
/// by the score's pivot) where the feasible set may start exactly; when one of
/// them lands inside the final bracket and is feasible it is returned instead
/// of the bracket's right end, which makes quantile-type answers exact.
pub fn left_root(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    candidates: &[f64],
    settings: &SolveSettings,
) -> Result<f64> {
    left_root_traced(g, lo, hi, candidates, settings).map(|t| t.root)
}

pub fn left_root_traced(
    g: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    candidates: &[f64],
    settings: &SolveSettings,
) -> Result<RootTrace> {
    let mut evaluations = Vec::new();
    let mut eval = |x: f64| {
        let y = g(x);
        evaluations.push((x, y));
        y
    };
    let g_lo = eval(lo);
    if g_lo <= settings.tol_f {
        return Ok(RootTrace { root: lo, iterations: 0, evaluations });
    }
    let g_hi = eval(hi);
    if g_hi > settings.tol_f || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::BracketFailure { lo, hi, g_lo, g_hi });
    }
    let mut iterations = 0;
    while hi - lo > settings.tol_x {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket is down to adjacent floats.
            break;
        }
        if iterations == settings.max_iter {
            return Err(Error::MaxIterExceeded(settings.max_iter));
        }
        iterations += 1;
        if eval(mid) <= settings.tol_f {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut root = hi;
    for &c in candidates.iter().filter(|&&c| c > lo && c < hi) {
        if eval(c) <= settings.tol_f {
            root = root.min(c);
            break;
        }
    }
    Ok(RootTrace { root, iterations, evaluations })
}
