use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::search::{search, Problem, Scored};
use super::{
    violation_threshold, BajraktarevicMap, ConvexityVerdict, SearchBudget, Status, Witness,
};
use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, WeightSpec};
use crate::interval::Interval;

const LAMBDA_RANGE: (f64, f64) = (0.02, 0.98);

/// Closed sampling box strictly inside `domain`.
fn sampling_box(domain: &Interval) -> (f64, f64) {
    let (lo, hi) = domain.window();
    let pad = 1e-9 * (hi - lo);
    (lo + pad, hi - pad)
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

/// Cubically concentrated towards a randomly chosen end of the box.
fn near_boundary(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let d = 0.5 * (hi - lo) * rng.random::<f64>().powi(3);
    if rng.random::<bool>() {
        lo + d
    } else {
        hi - d
    }
}

/// A small perturbation of `v` on a log-uniform scale between 0.03% and 30% of the box.
fn nearby(rng: &mut ChaCha8Rng, v: f64, (lo, hi): (f64, f64)) -> f64 {
    let s = 10f64.powf(-rng.random_range(0.5..3.5));
    (v + (hi - lo) * s * rng.random_range(-1.0..=1.0)).clamp(lo, hi)
}

/// Draw one point for stratum `index % 4`: two uniform strata, one of
/// near-coincident pairs, one concentrated at the box ends. `pair` coordinates
/// are split into a first half and a second half that form the pair.
fn stratified_pair(rng: &mut ChaCha8Rng, index: u64, boxes: &[(f64, f64)]) -> Vec<f64> {
    let half = boxes.len() / 2;
    match index % 4 {
        0 | 1 => boxes.iter().map(|&b| uniform(rng, b)).collect(),
        2 => {
            let edge = rng.random::<bool>();
            let first: Vec<f64> = boxes[..half]
                .iter()
                .map(|&b| {
                    if edge {
                        near_boundary(rng, b)
                    } else {
                        uniform(rng, b)
                    }
                })
                .collect();
            let second: Vec<f64> = first
                .iter()
                .zip(&boxes[half..])
                .map(|(&v, &b)| nearby(rng, v, b))
                .collect();
            first.into_iter().chain(second).collect()
        }
        _ => boxes.iter().map(|&b| near_boundary(rng, b)).collect(),
    }
}

fn verdict_from(
    outcome: super::search::Outcome,
    budget: &SearchBudget,
    witness: impl Fn(&[f64], f64) -> Witness,
) -> ConvexityVerdict {
    let (status, witness) = match (&outcome.best, outcome.found) {
        (Some((p, s)), true) => (Status::NotConvex, Some(witness(p, s.margin))),
        _ => (Status::Inconclusive, None),
    };
    ConvexityVerdict {
        status,
        witness,
        method: "sampling".into(),
        samples_used: outcome.samples_used,
        seed: Some(budget.seed),
    }
}

/// Midpoint violation `M((x+y)/2) - (M(x)+M(y))/2` and the scale used for its threshold.
fn midpoint_violation<M>(mean: &M, x: &[f64], y: &[f64]) -> Result<(f64, f64)>
where
    M: Fn(&[f64]) -> Result<f64>,
{
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    let (mx, my, mm) = (mean(x)?, mean(y)?, mean(&mid)?);
    Ok((mm - 0.5 * (mx + my), mx.abs() + my.abs()))
}

/// Recompute the Jensen violation margin of a witness from scratch.
pub fn jensen_margin<M>(mean: M, x: &[f64], y: &[f64]) -> Result<f64>
where
    M: Fn(&[f64]) -> Result<f64>,
{
    midpoint_violation(&mean, x, y).map(|(m, _)| m)
}

/// A symmetric pair `c - t v`, `c + t v` around a centre `c` drawn towards
/// the corners of the box, where `v` is the direction of least curvature of
/// the mean at `c` (smallest eigenvector of a finite-difference Hessian).
/// Violations that live in one narrow direction near a corner are almost
/// never hit by independent draws.
fn curvature_probe<M>(mean: &M, rng: &mut ChaCha8Rng, boxes: &[(f64, f64)]) -> Option<Vec<f64>>
where
    M: Fn(&[f64]) -> Result<f64>,
{
    let n = boxes.len();
    let width = boxes
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    let depth = width * 10f64.powf(-rng.random_range(1.0..4.0));
    let c: Vec<f64> = boxes
        .iter()
        .map(|&(lo, hi)| {
            let d = depth * rng.random_range(1.0..2.0);
            if rng.random::<bool>() {
                lo + d
            } else {
                hi - d
            }
        })
        .collect();
    let h = 0.05 * depth;
    let at = |shift: &[(usize, f64)]| -> Option<f64> {
        let mut p = c.clone();
        for &(i, d) in shift {
            p[i] += d;
        }
        mean(&p).ok().filter(|v| v.is_finite())
    };
    let m0 = at(&[])?;
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        hess[(i, i)] = (at(&[(i, h)])? - 2.0 * m0 + at(&[(i, -h)])?) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)])? - at(&[(i, h), (j, -h)])? - at(&[(i, -h), (j, h)])?
                + at(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(hess);
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k);
    let reach = (0..n)
        .filter(|&i| v[i] != 0.0)
        .map(|i| {
            let (lo, hi) = boxes[i];
            (c[i] - lo).min(hi - c[i]) / v[i].abs()
        })
        .fold(f64::INFINITY, f64::min);
    let t = reach * rng.random_range(0.5..0.999);
    let x = (0..n).map(|i| c[i] - t * v[i]);
    let y = (0..n).map(|i| c[i] + t * v[i]);
    Some(x.chain(y).collect())
}

/// Search for `x, y` in `domain^n` with `M((x+y)/2) > (M(x)+M(y))/2`.
///
/// Every eighth draw is a curvature probe (one half of the near-boundary
/// stratum); the rest follow the stratification of the other oracles.
pub fn jensen_falsify<M>(
    mean: M,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict>
where
    M: Fn(&[f64]) -> Result<f64> + Sync,
{
    budget.validate()?;
    let n = budget.n_vars;
    let boxes = vec![sampling_box(domain); 2 * n];
    let sample = |rng: &mut ChaCha8Rng, i: u64| {
        if i % 8 == 7 {
            if let Some(p) = curvature_probe(&mean, rng, &boxes[..n]) {
                return p;
            }
        }
        stratified_pair(rng, i, &boxes)
    };
    let score = |p: &[f64]| -> Result<Scored> {
        let (margin, scale) = midpoint_violation(&mean, &p[..n], &p[n..])?;
        Ok(Scored {
            score: margin - violation_threshold(scale),
            margin,
        })
    };
    let problem = Problem {
        bounds: boxes.clone(),
        sample: &sample,
        score: &score,
    };
    let outcome = search(&problem, budget)?;
    Ok(verdict_from(outcome, budget, |p, margin| Witness {
        x: p[..n].to_vec(),
        y: p[n..].to_vec(),
        margin,
        lambda: None,
    }))
}

/// Chord test for a function of `k` variables: points `P`, `Q` and chord
/// parameter `lambda` are the coordinates `[P, Q, lambda]`.
fn chord_test<F>(func: F, boxes: Vec<(f64, f64)>, budget: &SearchBudget) -> Result<ConvexityVerdict>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    budget.validate()?;
    let k = boxes.len();
    let mut bounds: Vec<(f64, f64)> = boxes.iter().chain(boxes.iter()).copied().collect();
    bounds.push(LAMBDA_RANGE);
    let sample = |rng: &mut ChaCha8Rng, i: u64| {
        let mut p = stratified_pair(rng, i, &bounds[..2 * k]);
        // Half of the uniform draws test the plain midpoint.
        p.push(if i % 4 == 1 {
            0.5
        } else {
            uniform(rng, LAMBDA_RANGE)
        });
        p
    };
    let eval = |pt: &[f64]| -> Result<f64> {
        let v = func(pt)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MeanError::NonFinite {
                at: pt.to_vec(),
                value: v,
            })
        }
    };
    let score = |p: &[f64]| -> Result<Scored> {
        let (a, b, l) = (&p[..k], &p[k..2 * k], p[2 * k]);
        let inner: Vec<f64> = a
            .iter()
            .zip(b)
            .map(|(s, t)| l * s + (1.0 - l) * t)
            .collect();
        let (fa, fb, fm) = (eval(a)?, eval(b)?, eval(&inner)?);
        let margin = fm - (l * fa + (1.0 - l) * fb);
        Ok(Scored {
            score: margin - violation_threshold(fa.abs() + fb.abs()),
            margin,
        })
    };
    let problem = Problem {
        bounds: bounds.clone(),
        sample: &sample,
        score: &score,
    };
    let outcome = search(&problem, budget)?;
    Ok(verdict_from(outcome, budget, |p, margin| Witness {
        x: p[..k].to_vec(),
        y: p[k..2 * k].to_vec(),
        margin,
        lambda: Some(p[2 * k]),
    }))
}

/// Search for a chord of `F` on `dx x du` lying below the graph.
pub fn bivariate_convexity_test<F>(
    func: F,
    dx: &Interval,
    du: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    chord_test(
        |p| func(p[0], p[1]),
        vec![sampling_box(dx), sampling_box(du)],
        budget,
    )
}

/// Search for a chord of `g` on `domain` lying below the graph.
pub fn univariate_convexity_test<F>(
    g: F,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    chord_test(|p| g(p[0]), vec![sampling_box(domain)], budget)
}

fn map_on(
    f: &GeneratorSpec,
    p: &WeightSpec,
    domain: &Interval,
) -> Result<(BajraktarevicMap, Vec<(f64, f64)>)> {
    if f.d2.is_none() || p.d1.is_none() || f.d1.is_none() {
        return Err(MeanError::Precondition(
            "f', f'' and p' are required".into(),
        ));
    }
    let map = BajraktarevicMap::new(f.clone(), p.clone())?;
    let on = domain.intersect(&map.domain()?)?;
    Ok((map, vec![sampling_box(&on); 4]))
}

/// Search for `(x,u), (y,v)` with `B(y,v) < B(x,u) + grad B(x,u) . (y-x, v-u)`.
pub fn subgradient_inequality_test(
    f: &GeneratorSpec,
    p: &WeightSpec,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    budget.validate()?;
    let (map, boxes) = map_on(f, p, domain)?;
    let sample = |rng: &mut ChaCha8Rng, i: u64| stratified_pair(rng, i, &boxes);
    let score = |q: &[f64]| -> Result<Scored> {
        let (x, u, y, v) = (q[0], q[1], q[2], q[3]);
        let b0 = map.value(x, u)?;
        let b1 = map.value(y, v)?;
        let g = map.gradient(x, u)?;
        let margin = b0 + g[0] * (y - x) + g[1] * (v - u) - b1;
        Ok(Scored {
            score: margin - violation_threshold(b0.abs() + b1.abs()),
            margin,
        })
    };
    let problem = Problem {
        bounds: boxes.clone(),
        sample: &sample,
        score: &score,
    };
    let outcome = search(&problem, budget)?;
    Ok(verdict_from(outcome, budget, |q, margin| Witness {
        x: q[..2].to_vec(),
        y: q[2..].to_vec(),
        margin,
        lambda: None,
    }))
}

/// Search for `(x,u), (y,v)` with `(grad B(x,u) - grad B(y,v)) . ((x,u) - (y,v)) < 0`.
pub fn gradient_monotonicity_test(
    f: &GeneratorSpec,
    p: &WeightSpec,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    budget.validate()?;
    let (map, boxes) = map_on(f, p, domain)?;
    let sample = |rng: &mut ChaCha8Rng, i: u64| stratified_pair(rng, i, &boxes);
    let score = |q: &[f64]| -> Result<Scored> {
        let (x, u, y, v) = (q[0], q[1], q[2], q[3]);
        let g0 = map.gradient(x, u)?;
        let g1 = map.gradient(y, v)?;
        let margin = -((g0[0] - g1[0]) * (x - y) + (g0[1] - g1[1]) * (u - v));
        let scale = g0[0].abs() + g0[1].abs() + g1[0].abs() + g1[1].abs();
        Ok(Scored {
            score: margin - violation_threshold(scale),
            margin,
        })
    };
    let problem = Problem {
        bounds: boxes.clone(),
        sample: &sample,
        score: &score,
    };
    let outcome = search(&problem, budget)?;
    Ok(verdict_from(outcome, budget, |q, margin| Witness {
        x: q[..2].to_vec(),
        y: q[2..].to_vec(),
        margin,
        lambda: None,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::FunctionExpr;
    use crate::means::{gini_mean, holder_mean, GiniParams};

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn arithmetic(x: &[f64]) -> Result<f64> {
        Ok(x.iter().sum::<f64>() / x.len() as f64)
    }

    #[test]
    fn arithmetic_mean_is_never_refuted() {
        let v = jensen_falsify(
            arithmetic,
            &iv(-3.0, 50.0),
            &SearchBudget::new(20_000, 3, 1),
        )
        .unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert!(v.witness.is_none());
        assert_eq!(v.method, "sampling");
    }

    #[test]
    fn holder_half_is_refuted_with_a_valid_witness() {
        let mean = |x: &[f64]| holder_mean(0.5, x).map(|m| m.value);
        let v = jensen_falsify(mean, &iv(0.1, 10.0), &SearchBudget::new(100_000, 2, 7)).unwrap();
        assert_eq!(v.status, Status::NotConvex);
        let w = v.witness.unwrap();
        let again = jensen_margin(mean, &w.x, &w.y).unwrap();
        assert_eq!(again, w.margin);
        assert!(again > violation_threshold(1.0));
    }

    #[test]
    fn holder_two_survives() {
        let mean = |x: &[f64]| holder_mean(2.0, x).map(|m| m.value);
        let v = jensen_falsify(mean, &iv(0.1, 10.0), &SearchBudget::new(100_000, 2, 7)).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert!(v.samples_used <= 100_000);
    }

    #[test]
    fn falsifier_is_deterministic() {
        let mean = |x: &[f64]| gini_mean(GiniParams { q: 2.0, r: 3.0 }, x).map(|m| m.value);
        let b = SearchBudget::new(20_000, 3, 42);
        let a = jensen_falsify(mean, &iv(1.0, 6.0), &b).unwrap();
        let c = jensen_falsify(mean, &iv(1.0, 6.0), &b).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn bivariate_examples() {
        let b = SearchBudget::new(20_000, 2, 3);
        let unit = iv(0.0, 1.0);
        let lin = bivariate_convexity_test(|x, u| Ok(x - u), &unit, &unit, &b).unwrap();
        assert_eq!(lin.status, Status::Inconclusive);
        let sq = bivariate_convexity_test(|x, u| Ok((x - u).powi(2)), &unit, &unit, &b).unwrap();
        assert_eq!(sq.status, Status::Inconclusive);
        let cap = bivariate_convexity_test(|x, _| Ok(-x * x), &unit, &unit, &b).unwrap();
        assert_eq!(cap.status, Status::NotConvex);
        let w = cap.witness.unwrap();
        let l = w.lambda.unwrap();
        let m = l * w.x[0] + (1.0 - l) * w.y[0];
        let recomputed = -m * m - (l * -w.x[0].powi(2) + (1.0 - l) * -w.y[0].powi(2));
        assert!((recomputed - w.margin).abs() < 1e-15 && recomputed > 0.0);
    }

    #[test]
    fn univariate_examples() {
        let b = SearchBudget::new(10_000, 1, 3);
        let on = iv(0.1, 10.0);
        assert_eq!(
            univariate_convexity_test(|t| Ok(t * t), &on, &b)
                .unwrap()
                .status,
            Status::Inconclusive
        );
        assert_eq!(
            univariate_convexity_test(|t| Ok(t.sqrt()), &on, &b)
                .unwrap()
                .status,
            Status::NotConvex
        );
    }

    fn pair(f: FunctionExpr, p: FunctionExpr) -> (GeneratorSpec, WeightSpec) {
        (f.to_generator().unwrap(), p.to_weight().unwrap())
    }

    #[test]
    fn derivative_oracles_on_examples() {
        let b = SearchBudget::new(20_000, 2, 9);
        let cases = [
            (
                FunctionExpr::Identity,
                FunctionExpr::Const(1.0),
                iv(0.1, 10.0),
                Status::Inconclusive,
            ),
            (
                FunctionExpr::Power(-1.0),
                FunctionExpr::Power(3.0),
                iv(1.0, 4.0),
                Status::NotConvex,
            ),
            (
                FunctionExpr::Power(2.0),
                FunctionExpr::Const(1.0),
                iv(0.1, 10.0),
                Status::Inconclusive,
            ),
            (
                FunctionExpr::Identity,
                FunctionExpr::Identity,
                iv(0.5, 8.0),
                Status::Inconclusive,
            ),
        ];
        for (f, p, on, want) in cases {
            let (f, p) = pair(f, p);
            let sub = subgradient_inequality_test(&f, &p, &on, &b).unwrap();
            let grad = gradient_monotonicity_test(&f, &p, &on, &b).unwrap();
            assert_eq!(sub.status, want, "subgradient {} {}", f.name, p.name);
            assert_eq!(grad.status, want, "gradient {} {}", f.name, p.name);
        }
    }

    #[test]
    fn derivative_oracles_need_derivatives() {
        let f = GeneratorSpec::new(
            "bare",
            Interval::positive(),
            crate::function::Monotonicity::Increasing,
            |x| x,
        );
        let p = WeightSpec::constant(1.0);
        let err = subgradient_inequality_test(&f, &p, &iv(1.0, 2.0), &SearchBudget::new(10, 2, 0))
            .unwrap_err();
        assert!(matches!(err, MeanError::Precondition(_)));
    }
}
