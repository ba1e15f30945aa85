//! Numerical convexity oracles. Sampling can refute convexity with a witness
//! but never establishes it: the strongest sampled verdict is `Inconclusive`.

mod bajraktarevic;
mod oracles;
mod search;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};

pub use bajraktarevic::BajraktarevicMap;
pub use oracles::{
    bivariate_convexity_test, gradient_monotonicity_test, jensen_falsify, jensen_margin,
    subgradient_inequality_test, univariate_convexity_test,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Convex,
    NotConvex,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Convex => "convex",
            Status::NotConvex => "not-convex",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// A pair of points violating the tested inequality.
///
/// For Jensen tests `x`, `y` are the two input vectors. For tests on maps of
/// two variables they are the points `(x, u)` and `(y, v)`; `lambda` is the
/// chord parameter when one was used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::report::floats")]
    pub x: Vec<f64>,
    #[serde(serialize_with = "crate::report::floats")]
    pub y: Vec<f64>,
    #[serde(serialize_with = "crate::report::float")]
    pub margin: f64,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::report::opt_float"
    )]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub status: Status,
    pub witness: Option<Witness>,
    /// Which rule or oracle produced the verdict.
    pub method: String,
    pub samples_used: u64,
    pub seed: Option<u64>,
}

impl ConvexityVerdict {
    pub fn analytic(status: Status, method: impl Into<String>) -> Self {
        Self {
            status,
            witness: None,
            method: method.into(),
            samples_used: 0,
            seed: None,
        }
    }

    pub fn is_convex(&self) -> bool {
        self.status == Status::Convex
    }

    pub fn is_not_convex(&self) -> bool {
        self.status == Status::NotConvex
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_samples: u64,
    pub n_vars: usize,
    pub seed: u64,
    pub refinement_rounds: u32,
}

impl SearchBudget {
    pub fn new(max_samples: u64, n_vars: usize, seed: u64) -> Self {
        Self {
            max_samples,
            n_vars,
            seed,
            refinement_rounds: 3,
        }
    }

    pub fn with_rounds(mut self, rounds: u32) -> Self {
        self.refinement_rounds = rounds;
        self
    }

    pub fn with_n_vars(mut self, n_vars: usize) -> Self {
        self.n_vars = n_vars;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_samples == 0 || self.n_vars == 0 || self.refinement_rounds == 0 {
            return Err(MeanError::InvalidParameter(format!(
                "search budget fields must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer applied to `seed + (stream + 1) * golden`. Every
/// sample index gets its own stream, so results never depend on how the work
/// is split between threads.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, stream))
}

/// Tolerance below which a violation is treated as rounding noise.
pub fn violation_threshold(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_matches_reference_splitmix() {
        // splitmix64 state 0 advanced once produces 0xE220A8397B1DCDAF.
        assert_eq!(mix(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_ne!(mix(1, 0), mix(0, 1));
    }

    #[test]
    fn budget_validation() {
        assert!(SearchBudget::new(10, 2, 0).validate().is_ok());
        assert!(SearchBudget::new(0, 2, 0).validate().is_err());
        assert!(SearchBudget::new(10, 0, 0).validate().is_err());
        assert!(SearchBudget::new(10, 2, 0)
            .with_rounds(0)
            .validate()
            .is_err());
    }
}
