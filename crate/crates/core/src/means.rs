//! Concrete mean families: Hölder, quasiarithmetic, Gini and Bajraktarević.

use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, WeightSpec};
use crate::interval::Interval;
use crate::root::invert_monotone;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanFamily {
    Holder,
    Quasiarithmetic,
    Gini,
    Bajraktarevic,
    Deviation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: f64,
    pub family: MeanFamily,
    pub inputs: Vec<f64>,
}

/// Exponent pair of a Gini mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniParams {
    pub q: f64,
    pub r: f64,
}

/// Below this gap the `q = r` formula is used.
pub const GINI_DIAGONAL: f64 = 1e-12;
/// Below this gap the power-ratio formula is replaced by its moment expansion.
const GINI_NEAR_DIAGONAL: f64 = 1e-4;

impl GiniParams {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        if !q.is_finite() || !r.is_finite() {
            return Err(MeanError::InvalidParameter(format!(
                "Gini exponents must be finite, got ({q}, {r})"
            )));
        }
        Ok(Self { q, r })
    }

    pub fn is_diagonal(&self) -> bool {
        (self.q - self.r).abs() < GINI_DIAGONAL
    }

    pub fn gamma(&self, t: f64) -> Result<f64> {
        crate::characterization::gamma(self.q, self.r, t)
    }

    pub fn beta(&self) -> Option<f64> {
        crate::characterization::beta(self.q, self.r)
    }

    /// The equivalent Bajraktarević pair: `f = x^(q-r)`, `p = x^r` off the
    /// diagonal, `f = log`, `p = x^q` on it.
    pub fn bajraktarevic_pair(
        &self,
    ) -> (crate::catalog::FunctionExpr, crate::catalog::FunctionExpr) {
        use crate::catalog::FunctionExpr as F;
        let weight = if self.r == 0.0 {
            F::Const(1.0)
        } else {
            F::Power(self.r)
        };
        if self.is_diagonal() {
            let weight = if self.q == 0.0 {
                F::Const(1.0)
            } else {
                F::Power(self.q)
            };
            (F::Log, weight)
        } else if self.q - self.r == 1.0 {
            (F::Identity, weight)
        } else {
            (F::Power(self.q - self.r), weight)
        }
    }
}

pub(crate) fn check_nonempty(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        Err(MeanError::EmptyInput)
    } else {
        Ok(())
    }
}

fn check_positive(x: &[f64]) -> Result<()> {
    check_nonempty(x)?;
    for (index, &value) in x.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(MeanError::NonPositive { index, value });
        }
    }
    Ok(())
}

pub(crate) fn check_domain(x: &[f64], domain: &Interval) -> Result<()> {
    check_nonempty(x)?;
    x.iter()
        .enumerate()
        .try_for_each(|(i, &v)| domain.check_member(i, v))
}

pub(crate) fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// If every entry equals the first, the mean is that entry exactly.
pub(crate) fn constant_value(x: &[f64]) -> Option<f64> {
    x.iter().all(|&v| v == x[0]).then(|| x[0])
}

fn finish(value: f64, family: MeanFamily, x: &[f64]) -> Result<MeanValue> {
    if !value.is_finite() {
        return Err(MeanError::NonFinite {
            at: x.to_vec(),
            value,
        });
    }
    let (lo, hi) = min_max(x);
    Ok(MeanValue {
        value: value.clamp(lo, hi),
        family,
        inputs: x.to_vec(),
    })
}

/// `((x_1^p + ... + x_n^p) / n)^(1/p)`, geometric mean at `p = 0`.
pub fn holder_mean(p: f64, x: &[f64]) -> Result<MeanValue> {
    check_positive(x)?;
    if !p.is_finite() {
        return Err(MeanError::InvalidParameter(format!(
            "Hölder exponent must be finite, got {p}"
        )));
    }
    if let Some(c) = constant_value(x) {
        return finish(c, MeanFamily::Holder, x);
    }
    let n = x.len() as f64;
    let value = if p == 0.0 {
        (x.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
    } else {
        // Scale so every ratio^p is at most 1; nothing can overflow.
        let (lo, hi) = min_max(x);
        let s = if p > 0.0 { hi } else { lo };
        let avg = x.iter().map(|v| (v / s).powf(p)).sum::<f64>() / n;
        s * avg.powf(1.0 / p)
    };
    finish(value, MeanFamily::Holder, x)
}

/// `f^{-1}((f(x_1) + ... + f(x_n)) / n)`.
pub fn quasiarithmetic_mean(f: &GeneratorSpec, x: &[f64]) -> Result<MeanValue> {
    check_domain(x, &f.domain)?;
    if let Some(c) = constant_value(x) {
        return finish(c, MeanFamily::Quasiarithmetic, x);
    }
    let target = x.iter().map(|&v| f.eval(v)).sum::<f64>() / x.len() as f64;
    let value = invert_within(f, target, x)?;
    finish(value, MeanFamily::Quasiarithmetic, x)
}

/// Gini mean: `(sum x^q / sum x^r)^(1/(q-r))`, or
/// `exp(sum x^q ln x / sum x^q)` when `q = r`.
pub fn gini_mean(g: GiniParams, x: &[f64]) -> Result<MeanValue> {
    check_positive(x)?;
    if let Some(c) = constant_value(x) {
        return finish(c, MeanFamily::Gini, x);
    }
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let (q, r) = (g.q, g.r);
    let gap = q - r;
    let log_value = if gap.abs() < GINI_NEAR_DIAGONAL {
        // ln G = K'(m) + (d^2/6) K'''(m) + O(d^4) with K(s) = ln sum x^s.
        let m = if gap.abs() < GINI_DIAGONAL {
            q
        } else {
            0.5 * (q + r)
        };
        let d = if gap.abs() < GINI_DIAGONAL {
            0.0
        } else {
            0.5 * gap
        };
        let (mean, third) = weighted_log_moments(&logs, m);
        mean + d * d / 6.0 * third
    } else {
        (log_sum_exp(&logs, q) - log_sum_exp(&logs, r)) / gap
    };
    finish(log_value.exp(), MeanFamily::Gini, x)
}

fn log_sum_exp(logs: &[f64], s: f64) -> f64 {
    let peak = logs.iter().map(|l| s * l).fold(f64::NEG_INFINITY, f64::max);
    peak + logs.iter().map(|l| (s * l - peak).exp()).sum::<f64>().ln()
}

/// Mean and third central moment of `ln x` under weights proportional to `x^m`.
fn weighted_log_moments(logs: &[f64], m: f64) -> (f64, f64) {
    let peak = logs.iter().map(|l| m * l).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (m * l - peak).exp()).collect();
    let total: f64 = w.iter().sum();
    let mean = w.iter().zip(logs).map(|(w, l)| w * l).sum::<f64>() / total;
    let third = w
        .iter()
        .zip(logs)
        .map(|(w, l)| w * (l - mean).powi(3))
        .sum::<f64>()
        / total;
    (mean, third)
}

/// `f^{-1}(sum p(x_i) f(x_i) / sum p(x_i))`.
pub fn bajraktarevic_mean(f: &GeneratorSpec, p: &WeightSpec, x: &[f64]) -> Result<MeanValue> {
    check_domain(x, &f.domain)?;
    check_domain(x, &p.domain)?;
    if let Some(c) = constant_value(x) {
        return finish(c, MeanFamily::Bajraktarevic, x);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &v in x {
        let w = p.eval(v);
        if !(w > 0.0 && w.is_finite()) {
            return Err(MeanError::Precondition(format!(
                "weight {}({v}) = {w} is not positive",
                p.name
            )));
        }
        num += w * f.eval(v);
        den += w;
    }
    let value = invert_within(f, num / den, x)?;
    finish(value, MeanFamily::Bajraktarevic, x)
}

/// Invert `f` at `target`, knowing the answer lies in `[min x, max x]`.
fn invert_within(f: &GeneratorSpec, target: f64, x: &[f64]) -> Result<f64> {
    let (lo, hi) = min_max(x);
    if let Some(inv) = &f.inverse {
        let t = inv(target);
        if t.is_finite() {
            return Ok(t.clamp(lo, hi));
        }
    }
    invert_monotone(f, target, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::FunctionExpr;
    use crate::function::Monotonicity;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_mean(1.0, &[2.0, 4.0]).unwrap().value, 3.0);
        assert!(close(
            holder_mean(0.0, &[1.0, 4.0]).unwrap().value,
            2.0,
            1e-15
        ));
        assert!(close(
            holder_mean(2.0, &[1.0, 7.0]).unwrap().value,
            5.0,
            1e-15
        ));
        assert!(close(
            holder_mean(-1.0, &[1.0, 7.0]).unwrap().value,
            1.75,
            1e-15
        ));
    }

    #[test]
    fn holder_errors() {
        assert_eq!(holder_mean(1.0, &[]).unwrap_err(), MeanError::EmptyInput);
        assert_eq!(
            holder_mean(1.0, &[1.0, 0.0]).unwrap_err(),
            MeanError::NonPositive {
                index: 1,
                value: 0.0
            }
        );
        assert!(holder_mean(1.0, &[1.0, -2.0]).is_err());
    }

    #[test]
    fn holder_survives_huge_exponents() {
        let v = holder_mean(400.0, &[1e3, 2e3]).unwrap().value;
        assert!(close(v, 2e3 * 0.5f64.powf(1.0 / 400.0), 1e-12));
        let v = holder_mean(-400.0, &[1e-3, 2e-3]).unwrap().value;
        assert!(v > 1e-3 && v < 1.01e-3);
    }

    #[test]
    fn quasiarithmetic_examples() {
        let id = FunctionExpr::Identity.to_generator().unwrap();
        assert_eq!(quasiarithmetic_mean(&id, &[1.0, 5.0]).unwrap().value, 3.0);
        let log = FunctionExpr::Log.to_generator().unwrap();
        assert!(close(
            quasiarithmetic_mean(&log, &[1.0, 4.0]).unwrap().value,
            2.0,
            1e-15
        ));
        let sq = FunctionExpr::Power(2.0).to_generator().unwrap();
        assert!(close(
            quasiarithmetic_mean(&sq, &[1.0, 7.0]).unwrap().value,
            5.0,
            1e-15
        ));
    }

    #[test]
    fn quasiarithmetic_by_bisection() {
        let sq = GeneratorSpec::new("sq", Interval::positive(), Monotonicity::Increasing, |x| {
            x * x
        });
        assert!(close(
            quasiarithmetic_mean(&sq, &[1.0, 7.0]).unwrap().value,
            5.0,
            1e-13
        ));
        let err = quasiarithmetic_mean(&sq, &[1.0, -7.0]).unwrap_err();
        assert!(matches!(err, MeanError::OutOfDomain { index: 1, .. }));
        let bump = GeneratorSpec::new(
            "bump",
            Interval::real_line(),
            Monotonicity::Increasing,
            |x: f64| (x - 2.0).powi(2),
        );
        assert!(matches!(
            quasiarithmetic_mean(&bump, &[0.0, 3.0]).unwrap_err(),
            MeanError::NotMonotone { .. }
        ));
    }

    #[test]
    fn gini_examples() {
        let g = |q, r, x: &[f64]| gini_mean(GiniParams::new(q, r).unwrap(), x).unwrap().value;
        assert!(close(g(1.0, 0.0, &[2.0, 4.0]), 3.0, 1e-15));
        assert!(close(g(0.0, 0.0, &[1.0, 4.0]), 2.0, 1e-15));
        assert!(close(g(2.0, 1.0, &[1.0, 2.0, 3.0]), 7.0 / 3.0, 1e-15));
        // q = r = 2 on [1, 2]: exp((4 ln 2) / 5).
        assert!(close(
            g(2.0, 2.0, &[1.0, 2.0]),
            (0.8 * 2f64.ln()).exp(),
            1e-15
        ));
    }

    #[test]
    fn gini_is_continuous_across_the_diagonal() {
        let x = [0.3, 1.7, 4.0, 9.5];
        let on = gini_mean(GiniParams::new(1.5, 1.5).unwrap(), &x)
            .unwrap()
            .value;
        for gap in [1e-13, 1e-11, 1e-8, 1e-6, 5e-5, 2e-4, 1e-3] {
            let near = gini_mean(GiniParams::new(1.5 + gap, 1.5).unwrap(), &x)
                .unwrap()
                .value;
            assert!(
                (near - on).abs() < 10.0 * gap * on + 1e-13,
                "gap {gap}: {near} vs {on}"
            );
        }
    }

    #[test]
    fn bajraktarevic_examples() {
        let id = FunctionExpr::Identity.to_generator().unwrap();
        let one = WeightSpec::constant(1.0);
        assert_eq!(
            bajraktarevic_mean(&id, &one, &[1.0, 5.0]).unwrap().value,
            3.0
        );
        let x = FunctionExpr::Identity.to_weight().unwrap();
        let v = bajraktarevic_mean(&id, &x, &[1.0, 2.0, 3.0]).unwrap().value;
        assert!(close(v, 7.0 / 3.0, 1e-15));
        let log = FunctionExpr::Log.to_generator().unwrap();
        let x2 = FunctionExpr::Power(2.0).to_weight().unwrap();
        let v = bajraktarevic_mean(&log, &x2, &[1.0, 2.0]).unwrap().value;
        assert!(close(v, (0.8 * 2f64.ln()).exp(), 1e-15));
        assert!((v - 1.7411).abs() < 1e-4);
    }

    #[test]
    fn bajraktarevic_respects_weight_domain() {
        let id = FunctionExpr::Identity.to_generator().unwrap();
        let log = FunctionExpr::Log.to_weight().unwrap();
        assert!(matches!(
            bajraktarevic_mean(&id, &log, &[0.5, 2.0]).unwrap_err(),
            MeanError::OutOfDomain { index: 0, .. }
        ));
    }

    #[test]
    fn constant_inputs_are_fixed_points() {
        let x = [1.2345678901234567; 5];
        let g3 = FunctionExpr::Power(3.0).to_generator().unwrap();
        let w = FunctionExpr::Exp(0.3).to_weight().unwrap();
        for v in [
            holder_mean(0.37, &x).unwrap().value,
            quasiarithmetic_mean(&g3, &x).unwrap().value,
            gini_mean(GiniParams::new(-2.0, 0.5).unwrap(), &x)
                .unwrap()
                .value,
            bajraktarevic_mean(&g3, &w, &x).unwrap().value,
        ] {
            assert_eq!(v, x[0]);
        }
    }

    #[test]
    fn gini_pair_reproduces_gini() {
        let x = [1.5, 2.0, 7.25];
        for (q, r) in [
            (2.0, 1.0),
            (2.0, 3.0),
            (-1.0, 0.5),
            (0.0, -2.0),
            (1.5, 1.5),
            (0.0, 0.0),
        ] {
            let g = GiniParams::new(q, r).unwrap();
            let (f, p) = g.bajraktarevic_pair();
            let b = bajraktarevic_mean(&f.to_generator().unwrap(), &p.to_weight().unwrap(), &x)
                .unwrap()
                .value;
            let direct = gini_mean(g, &x).unwrap().value;
            assert!(close(b, direct, 1e-13), "({q},{r}): {b} vs {direct}");
        }
    }
}
