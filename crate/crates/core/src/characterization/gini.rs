//! Convexity of Gini means, globally, for two variables, and on a
//! subinterval `(a, b)` via the auxiliary functions gamma and beta.

use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};
use crate::lab::{ConvexityVerdict, Status};
use crate::means::GINI_DIAGONAL;

const GAMMA_GRID: usize = 1025;
/// Below `|d L|` this size, `sinh(dL)/d` is replaced by its series.
const SINH_SERIES: f64 = 1e-5;

/// `sinh(d L) / d`, continuous through `d = 0` where it equals `L`.
fn sinh_ratio(d: f64, l: f64) -> f64 {
    let z = d * l;
    if z.abs() < SINH_SERIES {
        l * (1.0 + z * z / 6.0)
    } else {
        z.sinh() / d
    }
}

/// `gamma_{q,r}(t) = (t^q - t^r)/(q - r)`, or `t^q ln t` when `q = r`.
pub fn gamma(q: f64, r: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(MeanError::InvalidParameter(format!(
            "gamma needs t > 0, got {t}"
        )));
    }
    let l = t.ln();
    if (q - r).abs() < GINI_DIAGONAL {
        return Ok(t.powf(q) * l);
    }
    let (m, d) = (0.5 * (q + r), 0.5 * (q - r));
    Ok(t.powf(m) * sinh_ratio(d, l))
}

/// Second derivative of `gamma_{q,r}` at `t`.
pub fn gamma_second_derivative(q: f64, r: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(MeanError::InvalidParameter(format!(
            "gamma needs t > 0, got {t}"
        )));
    }
    let l = t.ln();
    let (m, d) = if (q - r).abs() < GINI_DIAGONAL {
        (q, 0.0)
    } else {
        (0.5 * (q + r), 0.5 * (q - r))
    };
    let cosh = (d * l).cosh();
    Ok(t.powf(m - 2.0) * ((m * m - m + d * d) * sinh_ratio(d, l) + (2.0 * m - 1.0) * cosh))
}

/// `beta_{q,r} = (q(q-1) / (r(r-1)))^(1/(q-r))`, `exp(1/q + 1/(q-1))` when
/// `q = r`; absent outside its defining conditions.
pub fn beta(q: f64, r: f64) -> Option<f64> {
    if (q - r).abs() < GINI_DIAGONAL {
        if q == 0.0 || q == 1.0 {
            return None;
        }
        return Some((1.0 / q + 1.0 / (q - 1.0)).exp());
    }
    let (a, b) = (q * (q - 1.0), r * (r - 1.0));
    if !(a * b > 0.0) {
        return None;
    }
    let gap = q - r;
    let value = if gap.abs() >= 1e-3 {
        (a / b).powf(1.0 / gap)
    } else {
        // a/b = 1 + gap (q + r - 1) / b loses digits as gap -> 0.
        ((gap * (q + r - 1.0) / b).ln_1p() / gap).exp()
    };
    Some(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GiniCase {
    #[serde(rename = "global-(1)")]
    Global,
    #[serde(rename = "case-(2)")]
    Case2,
    #[serde(rename = "case-(3)")]
    Case3,
    #[serde(rename = "case-(4)")]
    Case4,
    #[serde(rename = "not-convex")]
    NotConvex,
}

impl GiniCase {
    pub fn label(&self) -> &'static str {
        match self {
            GiniCase::Global => "global-(1)",
            GiniCase::Case2 => "case-(2)",
            GiniCase::Case3 => "case-(3)",
            GiniCase::Case4 => "case-(4)",
            GiniCase::NotConvex => "not-convex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniDecision {
    pub verdict: ConvexityVerdict,
    pub case_label: GiniCase,
    pub beta_value: Option<f64>,
    /// Minimum of gamma'' over an evenly spaced grid on `[a/b, b/a]`.
    pub gamma_second_derivative_min: Option<f64>,
    /// Whether gamma'' is nonnegative (within 1e-9) at both `a/b` and `b/a`.
    pub endpoint_recheck: bool,
}

fn chain_global(lo: f64, hi: f64) -> bool {
    0.0 <= lo && lo <= 1.0 && 1.0 <= hi
}

/// Convexity of the Gini mean of every arity on the whole positive half-line.
pub fn decide_gini_global(q: f64, r: f64) -> ConvexityVerdict {
    let status = if chain_global(q.min(r), q.max(r)) {
        Status::Convex
    } else {
        Status::NotConvex
    };
    ConvexityVerdict::analytic(status, "gini-global")
}

/// Convexity of the two-variable Gini mean on the positive quadrant.
pub fn decide_gini_two_variable(q: f64, r: f64) -> ConvexityVerdict {
    let lo = q.min(r);
    let status = if 0.0 <= lo && lo <= 1.0 && 1.0 <= q + r {
        Status::Convex
    } else {
        Status::NotConvex
    };
    ConvexityVerdict::analytic(status, "gini-two-variable")
}

/// Convexity of the Gini mean of every arity on `(a, b)`, `0 < a < b < inf`.
pub fn decide_gini_subinterval(q: f64, r: f64, a: f64, b: f64) -> Result<GiniDecision> {
    if !(a > 0.0) || !(a < b) || !b.is_finite() {
        return Err(MeanError::InvalidInterval { lo: a, hi: b });
    }
    if !q.is_finite() || !r.is_finite() {
        return Err(MeanError::InvalidParameter(format!(
            "Gini exponents must be finite, got ({q}, {r})"
        )));
    }
    // The mean is symmetric in (q, r); work with q >= r.
    let (q, r) = if q >= r { (q, r) } else { (r, q) };
    let ratio = b / a;
    let inv_ratio = a / b;
    let bv = beta(q, r);
    let (lo, hi, sum) = (r, q, q + r);

    let case = if chain_global(lo, hi) {
        GiniCase::Global
    } else {
        match bv {
            Some(bt) if hi < 1.0 && 1.0 <= sum && bt <= inv_ratio => GiniCase::Case2,
            Some(bt) if lo <= 0.0 && 1.0 <= sum && bt >= ratio => GiniCase::Case3,
            Some(bt) if 1.0 <= lo && bt >= ratio => GiniCase::Case4,
            _ => GiniCase::NotConvex,
        }
    };

    let mut grid_min = f64::INFINITY;
    let (t0, t1) = (inv_ratio, ratio);
    for k in 0..GAMMA_GRID {
        let t = if k == GAMMA_GRID - 1 {
            t1
        } else {
            t0 + (t1 - t0) * k as f64 / (GAMMA_GRID - 1) as f64
        };
        grid_min = grid_min.min(gamma_second_derivative(q, r, t)?);
    }
    let tol = |t: f64| -> Result<bool> { Ok(gamma_second_derivative(q, r, t)? >= -1e-9) };
    let endpoint_recheck = tol(t0)? && tol(t1)?;

    let status = if case == GiniCase::NotConvex {
        Status::NotConvex
    } else {
        Status::Convex
    };
    Ok(GiniDecision {
        verdict: ConvexityVerdict::analytic(status, "gini-subinterval"),
        case_label: case,
        beta_value: bv,
        gamma_second_derivative_min: Some(grid_min),
        endpoint_recheck,
    })
}

/// Convexity of the Hölder mean of every arity: exactly when `p >= 1`.
pub fn decide_holder(p: f64) -> ConvexityVerdict {
    let status = if p >= 1.0 {
        Status::Convex
    } else {
        Status::NotConvex
    };
    ConvexityVerdict::analytic(status, "holder-exponent")
}
