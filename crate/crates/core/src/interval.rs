use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};

/// An open real interval `(lo, hi)`. Either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Half-width used to stand in for an infinite end when a finite window is needed.
const UNBOUNDED_REACH: f64 = 1.0e3;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(MeanError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// A finite window `[lo, hi]` for sampling. Infinite ends are replaced by a
    /// point `UNBOUNDED_REACH` (scaled by the magnitude of the finite end) away.
    pub fn window(&self) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + UNBOUNDED_REACH * (1.0 + self.lo.abs())),
            (false, true) => (self.hi - UNBOUNDED_REACH * (1.0 + self.hi.abs()), self.hi),
            (false, false) => (-UNBOUNDED_REACH, UNBOUNDED_REACH),
        }
    }

    /// Points strictly inside the window, evenly spaced, excluding both ends.
    pub fn interior_grid(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.window();
        let step = (hi - lo) / (points as f64 + 1.0);
        (1..=points).map(|k| lo + step * k as f64).collect()
    }

    /// Pull `x` strictly inside the sampling window.
    pub fn clamp_inside(&self, x: f64) -> f64 {
        let (lo, hi) = self.window();
        let pad = 1e-9 * (hi - lo);
        x.clamp(lo + pad, hi - pad)
    }

    pub fn check_member(&self, index: usize, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(MeanError::OutOfDomain {
                index,
                value: x,
                domain: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}
