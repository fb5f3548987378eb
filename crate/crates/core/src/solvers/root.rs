//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Outcome of a bracketed root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolveReport {
    pub root: f64,
    /// `|f(root)|`.
    pub residual: f64,
    pub iterations: usize,
    /// Initial bracket handed to the solver.
    pub bracket: (f64, f64),
}

/// Bisection on `[lo, hi]` until the bracket is no wider than `tol`.
///
/// Requires `f(lo) * f(hi) <= 0`. The returned root is the midpoint of the
/// final bracket, or an endpoint if `f` vanishes there exactly.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<RootSolveReport>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    let report = |root: f64, residual: f64, iterations| RootSolveReport {
        root,
        residual,
        iterations,
        bracket: (lo, hi),
    };
    if f_lo == 0.0 {
        return Ok(report(lo, 0.0, 0));
    }
    if f_hi == 0.0 {
        return Ok(report(hi, 0.0, 0));
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut b) = (lo, hi);
    let mut f_a = f_lo;
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // bracket is down to adjacent floats
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(report(mid, 0.0, iterations));
        }
        if f_mid.signum() == f_a.signum() {
            a = mid;
            f_a = f_mid;
        } else {
            b = mid;
        }
    }
    let root = 0.5 * (a + b);
    Ok(report(root, f(root).abs(), iterations))
}
