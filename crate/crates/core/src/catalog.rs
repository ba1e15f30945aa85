//! A small fixed catalog of concrete generators and weights.
//!
//! Syntax is `family[:p1[,p2]]`, e.g. `identity`, `power:3`, `log`, `exp`,
//! `exp:-2`, `affine:2,1`, `const:1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, Monotonicity, WeightSpec};
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionExpr {
    Identity,
    /// `x^p`, `p != 0`.
    Power(f64),
    Log,
    /// `exp(c x)`, `c != 0`.
    Exp(f64),
    /// `a x + b`, `a != 0`.
    Affine(f64, f64),
    /// Constant; only valid as a weight.
    Const(f64),
}

impl Serialize for FunctionExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FunctionExpr {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MeanError::InvalidParameter(format!("{self}: {m}")));
        match *self {
            FunctionExpr::Power(p) if p == 0.0 || !p.is_finite() => {
                bad("power exponent must be finite and nonzero")
            }
            FunctionExpr::Exp(c) if c == 0.0 || !c.is_finite() => {
                bad("exp rate must be finite and nonzero")
            }
            FunctionExpr::Affine(a, b) if a == 0.0 || !a.is_finite() || !b.is_finite() => {
                bad("affine slope must be finite and nonzero")
            }
            FunctionExpr::Const(c) if !(c > 0.0 && c.is_finite()) => {
                bad("constant must be positive")
            }
            _ => Ok(()),
        }
    }

    /// Power exponent if this is `x^p` (identity counts as `p = 1`).
    pub fn power_exponent(&self) -> Option<f64> {
        match *self {
            FunctionExpr::Identity => Some(1.0),
            FunctionExpr::Power(p) => Some(p),
            _ => None,
        }
    }

    /// Realize as a generator `f`.
    pub fn to_generator(&self) -> Result<GeneratorSpec> {
        self.validate()?;
        let name = self.to_string();
        use Monotonicity::*;
        let g = match *self {
            FunctionExpr::Identity => {
                GeneratorSpec::new(name, Interval::real_line(), Increasing, |x| x)
                    .with_d1(|_| 1.0)
                    .with_d2(|_| 0.0)
                    .with_inverse(|y| y)
            }
            FunctionExpr::Power(p) => {
                let mono = if p > 0.0 { Increasing } else { Decreasing };
                GeneratorSpec::new(name, Interval::positive(), mono, move |x| x.powf(p))
                    .with_d1(move |x| p * x.powf(p - 1.0))
                    .with_d2(move |x| p * (p - 1.0) * x.powf(p - 2.0))
                    .with_inverse(move |y| y.powf(1.0 / p))
            }
            FunctionExpr::Log => {
                GeneratorSpec::new(name, Interval::positive(), Increasing, f64::ln)
                    .with_d1(|x| 1.0 / x)
                    .with_d2(|x| -1.0 / (x * x))
                    .with_inverse(f64::exp)
            }
            FunctionExpr::Exp(c) => {
                let mono = if c > 0.0 { Increasing } else { Decreasing };
                GeneratorSpec::new(name, Interval::real_line(), mono, move |x| (c * x).exp())
                    .with_d1(move |x| c * (c * x).exp())
                    .with_d2(move |x| c * c * (c * x).exp())
                    .with_inverse(move |y| y.ln() / c)
            }
            FunctionExpr::Affine(a, b) => {
                let mono = if a > 0.0 { Increasing } else { Decreasing };
                GeneratorSpec::new(name, Interval::real_line(), mono, move |x| a * x + b)
                    .with_d1(move |_| a)
                    .with_d2(|_| 0.0)
                    .with_inverse(move |y| (y - b) / a)
            }
            FunctionExpr::Const(_) => {
                return Err(MeanError::InvalidParameter(format!(
                    "{self} cannot be used as a generator"
                )))
            }
        };
        Ok(g.with_expr(*self))
    }

    /// Realize as a weight `p`, restricted to where it is positive.
    pub fn to_weight(&self) -> Result<WeightSpec> {
        self.validate()?;
        let name = self.to_string();
        let w = match *self {
            FunctionExpr::Const(c) => return Ok(WeightSpec::constant(c)),
            FunctionExpr::Identity => {
                WeightSpec::new(name, Interval::positive(), |x| x).with_d1(|_| 1.0)
            }
            FunctionExpr::Power(p) => {
                WeightSpec::new(name, Interval::positive(), move |x| x.powf(p))
                    .with_d1(move |x| p * x.powf(p - 1.0))
            }
            FunctionExpr::Log => WeightSpec::new(name, Interval::new(1.0, f64::INFINITY)?, f64::ln)
                .with_d1(|x| 1.0 / x),
            FunctionExpr::Exp(c) => {
                WeightSpec::new(name, Interval::real_line(), move |x| (c * x).exp())
                    .with_d1(move |x| c * (c * x).exp())
            }
            FunctionExpr::Affine(a, b) => {
                let root = -b / a;
                let domain = if a > 0.0 {
                    Interval::new(root, f64::INFINITY)?
                } else {
                    Interval::new(f64::NEG_INFINITY, root)?
                };
                WeightSpec::new(name, domain, move |x| a * x + b).with_d1(move |_| a)
            }
        };
        Ok(w.with_expr(*self))
    }

    /// Draw a random generator expression (never `Const`).
    pub fn random_generator<R: Rng + ?Sized>(rng: &mut R) -> FunctionExpr {
        match rng.random_range(0..5) {
            0 => FunctionExpr::Identity,
            1 => FunctionExpr::Power(nonzero(rng, -3.0, 3.0)),
            2 => FunctionExpr::Log,
            3 => FunctionExpr::Exp(nonzero(rng, -1.5, 1.5)),
            _ => FunctionExpr::Affine(nonzero(rng, -3.0, 3.0), rng.random_range(-5.0..5.0)),
        }
    }

    /// Draw a random weight expression positive on `(1, inf)`.
    pub fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> FunctionExpr {
        match rng.random_range(0..6) {
            0 => FunctionExpr::Const(rng.random_range(0.1..10.0)),
            1 => FunctionExpr::Identity,
            2 => FunctionExpr::Power(nonzero(rng, -3.0, 3.0)),
            3 => FunctionExpr::Log,
            4 => FunctionExpr::Exp(nonzero(rng, -1.5, 1.5)),
            _ => {
                let a = rng.random_range(0.1..3.0);
                FunctionExpr::Affine(a, rng.random_range(-0.9 * a..5.0))
            }
        }
    }
}

fn nonzero<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let v: f64 = rng.random_range(lo..hi);
        if v.abs() > 0.05 {
            return v;
        }
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FunctionExpr::Identity => write!(f, "identity"),
            FunctionExpr::Power(p) => write!(f, "power:{p}"),
            FunctionExpr::Log => write!(f, "log"),
            FunctionExpr::Exp(c) => write!(f, "exp:{c}"),
            FunctionExpr::Affine(a, b) => write!(f, "affine:{a},{b}"),
            FunctionExpr::Const(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for FunctionExpr {
    type Err = MeanError;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = match s.split_once(':') {
            Some((f, p)) => (f.trim(), Some(p)),
            None => (s.trim(), None),
        };
        let nums: Vec<f64> = match params {
            None => Vec::new(),
            Some(p) => p
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        MeanError::InvalidParameter(format!("bad number {t:?} in {s:?}"))
                    })
                })
                .collect::<Result<_>>()?,
        };
        let arity = |n: &[usize]| -> Result<()> {
            if n.contains(&nums.len()) {
                Ok(())
            } else {
                Err(MeanError::InvalidParameter(format!(
                    "{family}: wrong number of parameters in {s:?}"
                )))
            }
        };
        let expr = match family.to_ascii_lowercase().as_str() {
            "identity" | "id" | "x" => {
                arity(&[0])?;
                FunctionExpr::Identity
            }
            "power" | "pow" => {
                arity(&[1])?;
                FunctionExpr::Power(nums[0])
            }
            "log" | "ln" => {
                arity(&[0])?;
                FunctionExpr::Log
            }
            "exp" => {
                arity(&[0, 1])?;
                FunctionExpr::Exp(nums.first().copied().unwrap_or(1.0))
            }
            "affine" => {
                arity(&[2])?;
                FunctionExpr::Affine(nums[0], nums[1])
            }
            "const" => {
                arity(&[0, 1])?;
                FunctionExpr::Const(nums.first().copied().unwrap_or(1.0))
            }
            other => {
                return Err(MeanError::InvalidParameter(format!(
                    "unknown function family {other:?}"
                )))
            }
        };
        expr.validate()?;
        Ok(expr)
    }
}
