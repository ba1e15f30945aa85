//! Bracketing root finders used for generator inversion and deviation means.

use crate::error::{MeanError, Result};
use crate::function::GeneratorSpec;

pub const MAX_ITERATIONS: usize = 200;
const INVERSE_RTOL: f64 = 1e-13;
const ROOT_RTOL: f64 = 1e-13;
const SECANT_STEPS: usize = 5;

/// Solve `f(t) = target` for `t` in `[lo, hi]` by bisection, where `f` is the
/// generator's strictly monotone function. Monotonicity violations discovered
/// along the way are reported rather than silently bisected through.
pub fn invert_monotone(f: &GeneratorSpec, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let s = f.monotonicity.sign();
    let g = |t: f64| s * (f.eval(t) - target);
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a), g(b));
    let not_monotone = |a: f64, b: f64| MeanError::NotMonotone {
        name: f.name.clone(),
        lo: a,
        hi: b,
        f_lo: f.eval(a),
        f_hi: f.eval(b),
        target,
    };
    if ga.is_nan() || gb.is_nan() || ga > 0.0 || gb < 0.0 {
        return Err(not_monotone(a, b));
    }
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    for _ in 0..MAX_ITERATIONS {
        let m = 0.5 * (a + b);
        if !(a < m && m < b) || (b - a) <= INVERSE_RTOL * a.abs().max(b.abs()) {
            return Ok(if -ga < gb { a } else { b });
        }
        let gm = g(m);
        if gm.is_nan() {
            return Err(MeanError::NonFinite {
                at: vec![m],
                value: gm,
            });
        }
        // A monotone f keeps g(m) between g(a) and g(b).
        if gm < ga || gm > gb {
            return Err(not_monotone(a, b));
        }
        if gm == 0.0 {
            return Ok(m);
        }
        if gm < 0.0 {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    Err(MeanError::NoConvergence {
        iterations: MAX_ITERATIONS,
        lo: a,
        hi: b,
    })
}

/// Find the root of a function that is nonnegative at `lo` and nonpositive
/// at `hi` with a single sign change in between.
///
/// Bisection to width `1e-13 (1 + |u|)`, then up to five secant steps that
/// are only accepted while they stay inside the final bracket and reduce
/// `|g|`.
pub fn decreasing_sign_root(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a), g(b));
    if ga.is_nan() || gb.is_nan() {
        return Err(MeanError::NonFinite {
            at: vec![a, b],
            value: if ga.is_nan() { ga } else { gb },
        });
    }
    if ga < 0.0 || gb > 0.0 {
        return Err(MeanError::NoSignChange {
            lo,
            hi,
            g_lo: ga,
            g_hi: gb,
        });
    }
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    let mut iterations = 0;
    loop {
        let m = 0.5 * (a + b);
        if (b - a) <= ROOT_RTOL * (1.0 + m.abs()) || !(a < m && m < b) {
            break;
        }
        if iterations == MAX_ITERATIONS {
            return Err(MeanError::NoConvergence {
                iterations,
                lo: a,
                hi: b,
            });
        }
        iterations += 1;
        let gm = g(m);
        if gm.is_nan() {
            return Err(MeanError::NonFinite {
                at: vec![m],
                value: gm,
            });
        }
        if gm == 0.0 {
            return Ok(m);
        }
        if gm > 0.0 {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }

    let (mut best, mut gbest) = if ga < -gb { (a, ga) } else { (b, gb) };
    let (mut x0, mut g0, mut x1, mut g1) = (a, ga, b, gb);
    for _ in 0..SECANT_STEPS {
        if g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if !(a <= x2 && x2 <= b) {
            break;
        }
        let g2 = g(x2);
        if !g2.is_finite() || g2.abs() >= gbest.abs() {
            break;
        }
        best = x2;
        gbest = g2;
        if g2 == 0.0 {
            break;
        }
        (x0, g0, x1, g1) = (x1, g1, x2, g2);
    }
    Ok(best)
}
