//! Scalar solver primitives shared by the equilibrium, dynamics, and
//! calibration modules: a bracketed root finder (bisection stabilized by
//! Illinois-style secant steps) and a damped fixed-point iteration.

use crate::error::Error;
use crate::Result;

/// Root of `f` inside a bracket with `f(lo) * f(hi) <= 0`.
///
/// Secant proposals are clipped to the bracket and fall back to bisection,
/// with the stale endpoint down-weighted (Illinois rule) so convergence is
/// never one-sided. Stops when `|f| < tol_f` or the bracket collapses.
#[allow(clippy::too_many_arguments)]
pub fn bracketed_root(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol_f: f64,
    max_iter: u32,
    what: &'static str,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    debug_assert!(fa * fb < 0.0, "bracket does not straddle a root");
    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for _ in 0..max_iter {
        let mut c = b - fb * (b - a) / (fb - fa);
        let width = (b - a).abs();
        if !c.is_finite() || (c - a).abs() < 1e-3 * width || (b - c).abs() < 1e-3 * width {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if !fc.is_finite() {
            return Err(Error::NonConvergence {
                what,
                iterations: 0,
                residual: fc,
            });
        }
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() <= tol_f {
            return Ok(c);
        }
        if (fc > 0.0) == (fb > 0.0) {
            // same side as b: replace b, halve a's weight
            b = c;
            fb = fc;
            fa *= 0.5;
        } else {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
        }
        if (b - a).abs() <= f64::EPSILON * b.abs().max(a.abs()).max(1.0) {
            return Ok(best.0);
        }
    }
    Err(Error::NonConvergence {
        what,
        iterations: max_iter,
        residual: best.1,
    })
}

/// Damped fixed-point iteration `x <- x + damping * (phi(x) - x)`.
///
/// Converges on the residual `|phi(x) - x|`, so the reported point satisfies
/// the fixed-point equation itself, not just step stagnation.
pub fn damped_fixed_point(
    mut phi: impl FnMut(f64) -> Result<f64>,
    x0: f64,
    damping: f64,
    tol_residual: f64,
    max_iter: u32,
    what: &'static str,
) -> Result<(f64, f64, u32)> {
    let mut x = x0;
    let mut residual = f64::INFINITY;
    for i in 0..max_iter {
        let px = phi(x)?;
        residual = px - x;
        if residual.abs() < tol_residual {
            return Ok((x, residual, i));
        }
        x += damping * residual;
    }
    Err(Error::NonConvergence {
        what,
        iterations: max_iter,
        residual,
    })
}
