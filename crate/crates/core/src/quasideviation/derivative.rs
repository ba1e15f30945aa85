//! One-sided partial derivatives `dE/dx+- (u, u)` by Richardson-extrapolated
//! difference quotients.

use serde::{Deserialize, Serialize};

use super::{Quasideviation, Side};
use crate::error::{MeanError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSidedEstimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSidedDerivatives {
    pub left: f64,
    pub right: f64,
    pub at: f64,
    pub left_error: f64,
    pub right_error: f64,
}

impl OneSidedDerivatives {
    /// The two sides differ by more than ten times the combined error.
    pub fn are_distinct(&self) -> bool {
        (self.left - self.right).abs() > 10.0 * (self.left_error + self.right_error)
    }
}

/// `lim (E(u + h, u) - E(u, u)) / h` as `h -> 0+` (or the backward quotient).
///
/// Starts at `h = 1e-4 (1 + |u|)`, shrunk to fit the domain, and extrapolates
/// over `h`, `h/2`, `h/4`. Quotients whose successive differences stop
/// shrinking are reported as non-differentiable.
pub fn one_sided_partial(e: &Quasideviation, u: f64, side: Side) -> Result<OneSidedEstimate> {
    if !e.domain.contains(u) {
        return Err(MeanError::OutOfDomain {
            index: 0,
            value: u,
            domain: e.domain.to_string(),
        });
    }
    let room = match side {
        Side::Right => e.domain.hi() - u,
        Side::Left => u - e.domain.lo(),
    };
    let h = (1e-4 * (1.0 + u.abs())).min(0.5 * room);
    let sign = match side {
        Side::Right => 1.0,
        Side::Left => -1.0,
    };
    let base = e.eval(u, u);
    let mut quotients = [0.0; 3];
    let mut magnitude = base.abs();
    for (k, q) in quotients.iter_mut().enumerate() {
        let x = u + sign * h / f64::from(1u32 << k);
        let v = e.eval(x, u);
        magnitude = magnitude.max(v.abs());
        *q = (v - base) / (x - u);
        if !q.is_finite() {
            return Err(MeanError::NonDifferentiable { u });
        }
    }
    let [d0, d1, d2] = quotients;
    let roundoff = 10.0 * f64::EPSILON * magnitude.max(f64::MIN_POSITIVE) / (h / 4.0);
    let (first, second) = ((d1 - d0).abs(), (d2 - d1).abs());
    if second > first && second > 1e-6 * (1.0 + d2.abs()) + 100.0 * roundoff {
        return Err(MeanError::NonDifferentiable { u });
    }
    let r1 = 2.0 * d1 - d0;
    let r2 = 2.0 * d2 - d1;
    let value = (4.0 * r2 - r1) / 3.0;
    Ok(OneSidedEstimate {
        value,
        error: (value - r2).abs() + roundoff,
    })
}

pub fn one_sided_derivatives(e: &Quasideviation, u: f64) -> Result<OneSidedDerivatives> {
    let left = one_sided_partial(e, u, Side::Left)?;
    let right = one_sided_partial(e, u, Side::Right)?;
    Ok(OneSidedDerivatives {
        left: left.value,
        right: right.value,
        at: u,
        left_error: left.error,
        right_error: right.error,
    })
}
