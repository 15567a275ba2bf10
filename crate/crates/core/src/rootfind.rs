//! Safeguarded Newton iteration on a sign-change bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Stop when the bracket (or the Newton step) is below `x_rel_tol * |x|`.
    pub x_rel_tol: f64,
    /// Stop when `|f| <= f_abs_tol`. Zero disables the test.
    pub f_abs_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            x_rel_tol: 4.0 * f64::EPSILON,
            f_abs_tol: 0.0,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    pub df: f64,
    pub iterations: usize,
}

/// Finds a zero of `f` in `[a, b]`, where `f` returns `(value, derivative)`
/// and `f(a)`, `f(b)` have opposite signs. Newton steps that leave the
/// bracket or stall are replaced by bisection.
pub fn safeguarded_newton<F>(mut f: F, a: f64, b: f64, opts: NewtonOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (fa, dfa) = f(a)?;
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            f: fa,
            df: dfa,
            iterations: 0,
        });
    }
    let (fb, dfb) = f(b)?;
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            f: fb,
            df: dfb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    // Orient so that f(lo) < 0 < f(hi).
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = 0.5 * (a + b);
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x)?;

    for it in 1..=opts.max_iter {
        if fx == 0.0 || fx.abs() <= opts.f_abs_tol {
            return Ok(Root {
                x,
                f: fx,
                df: dfx,
                iterations: it,
            });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx != 0.0 && {
            let cand = x - fx / dfx;
            (cand - lo) * (cand - hi) < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        let scale = opts.x_rel_tol * x.abs().max(f64::MIN_POSITIVE);
        let (nfx, ndfx) = f(x)?;
        fx = nfx;
        dfx = ndfx;
        if dx.abs() <= scale || (hi - lo).abs() <= scale {
            return Ok(Root {
                x,
                f: fx,
                df: dfx,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: fx.abs(),
    })
}
