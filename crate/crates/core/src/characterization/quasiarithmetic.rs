//! Quasiarithmetic means: convex exactly when `f'' = 0` throughout, or when
//! `f''` never vanishes and `f'/f''` is positive and convex.

use crate::error::{MeanError, Result};
use crate::function::GeneratorSpec;
use crate::interval::Interval;
use crate::lab::{univariate_convexity_test, ConvexityVerdict, SearchBudget, Status};

const GRID: usize = 257;

fn verdict(status: Status, method: &str) -> ConvexityVerdict {
    ConvexityVerdict::analytic(status, method)
}

/// Decide Jensen convexity of the quasiarithmetic mean generated by `f` on
/// `domain` (intersected with the domain of `f`).
///
/// The shape of `f''` is read off a grid with a dead zone of
/// `1e-10 (1 + |f'|)`; convexity of `f'/f''` is checked on the same grid and
/// by chord sampling.
pub fn decide_quasiarithmetic(
    f: &GeneratorSpec,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    let (Some(d1), Some(d2)) = (f.d1.as_ref(), f.d2.as_ref()) else {
        return Err(MeanError::Precondition(format!(
            "{}: f' and f'' are required",
            f.name
        )));
    };
    let on = domain.intersect(&f.domain)?;
    f.check_nonvanishing_d1(&on, GRID)?;

    let grid = on.interior_grid(GRID);
    let mut values = Vec::with_capacity(GRID);
    for &t in &grid {
        let (a, b) = (d1(t), d2(t));
        if !a.is_finite() || !b.is_finite() {
            return Err(MeanError::NonFinite {
                at: vec![t],
                value: if a.is_finite() { b } else { a },
            });
        }
        values.push((t, a, b));
    }
    let tol = |a: f64| 1e-10 * (1.0 + a.abs());
    let positive = values.iter().any(|&(_, a, b)| b > tol(a));
    let negative = values.iter().any(|&(_, a, b)| b < -tol(a));
    let zeros = values
        .iter()
        .filter(|&&(_, a, b)| b.abs() <= tol(a))
        .count();

    if zeros == values.len() {
        return Ok(verdict(Status::Convex, "quasiarithmetic-linear"));
    }
    if positive && negative {
        return Ok(verdict(Status::NotConvex, "quasiarithmetic-sign-change"));
    }
    if zeros > 0 {
        return Ok(verdict(Status::Inconclusive, "quasiarithmetic-dead-zone"));
    }

    let ratio: Vec<(f64, f64)> = values.iter().map(|&(t, a, b)| (t, a / b)).collect();
    if ratio.iter().any(|&(_, h)| !(h > 0.0)) {
        return Ok(verdict(Status::NotConvex, "quasiarithmetic-ratio"));
    }
    for w in ratio.windows(3) {
        // Evenly spaced: a negative second difference beyond rounding refutes convexity.
        let second = w[0].1 - 2.0 * w[1].1 + w[2].1;
        if second < -1e-9 * (w[0].1.abs() + w[1].1.abs() + w[2].1.abs()) {
            return Ok(verdict(Status::NotConvex, "quasiarithmetic-ratio"));
        }
    }
    let (d1, d2) = (d1.clone(), d2.clone());
    let h = move |t: f64| -> Result<f64> { Ok(d1(t) / d2(t)) };
    let chords = univariate_convexity_test(h, &on, budget)?;
    Ok(ConvexityVerdict {
        status: if chords.is_not_convex() {
            Status::NotConvex
        } else {
            Status::Convex
        },
        witness: None,
        method: "quasiarithmetic-ratio".into(),
        samples_used: chords.samples_used,
        seed: chords.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::FunctionExpr;
    use crate::characterization::decide_holder;
    use crate::function::Monotonicity;

    fn budget() -> SearchBudget {
        SearchBudget::new(20_000, 1, 3)
    }

    fn decide(expr: FunctionExpr, a: f64, b: f64) -> Status {
        let f = expr.to_generator().unwrap();
        decide_quasiarithmetic(&f, &Interval::new(a, b).unwrap(), &budget())
            .unwrap()
            .status
    }

    #[test]
    fn examples() {
        assert_eq!(decide(FunctionExpr::Identity, -5.0, 5.0), Status::Convex);
        assert_eq!(decide(FunctionExpr::Exp(1.0), 0.0, 5.0), Status::Convex);
        assert_eq!(
            decide(FunctionExpr::Power(0.5), 0.1, 10.0),
            Status::NotConvex
        );
        assert_eq!(
            decide(FunctionExpr::Affine(-2.0, 1.0), 0.0, 1.0),
            Status::Convex
        );
    }

    #[test]
    fn agrees_with_holder() {
        for p in [-2.0, -1.0, -0.5, 0.5, 0.99, 1.0, 1.01, 1.5, 2.0, 3.0] {
            let expr = if p == 1.0 {
                FunctionExpr::Identity
            } else {
                FunctionExpr::Power(p)
            };
            assert_eq!(decide(expr, 0.5, 5.0), decide_holder(p).status, "p = {p}");
        }
        assert_eq!(
            decide(FunctionExpr::Log, 0.5, 5.0),
            decide_holder(0.0).status
        );
    }

    #[test]
    fn sign_change_in_second_derivative() {
        let cubic = GeneratorSpec::new(
            "x^3+x",
            Interval::real_line(),
            Monotonicity::Increasing,
            |x| x * x * x + x,
        )
        .with_d1(|x| 3.0 * x * x + 1.0)
        .with_d2(|x| 6.0 * x);
        let v =
            decide_quasiarithmetic(&cubic, &Interval::new(-1.0, 1.0).unwrap(), &budget()).unwrap();
        assert_eq!(v.status, Status::NotConvex);
        assert_eq!(v.method, "quasiarithmetic-sign-change");
    }

    #[test]
    fn concave_ratio_is_refuted() {
        // f' = exp(2 sqrt x) gives f'/f'' = sqrt x (concave); f' = exp(-1/x) gives x^2.
        let f = GeneratorSpec::new(
            "int exp(2 sqrt x)",
            Interval::positive(),
            Monotonicity::Increasing,
            |x| x,
        )
        .with_d1(|x: f64| (2.0 * x.sqrt()).exp())
        .with_d2(|x: f64| (2.0 * x.sqrt()).exp() / x.sqrt());
        let v = decide_quasiarithmetic(&f, &Interval::new(0.5, 3.0).unwrap(), &budget()).unwrap();
        assert_eq!(v.status, Status::NotConvex);
        let g = GeneratorSpec::new(
            "int exp(-1/x)",
            Interval::positive(),
            Monotonicity::Increasing,
            |x| x,
        )
        .with_d1(|x: f64| (-1.0 / x).exp())
        .with_d2(|x: f64| (-1.0 / x).exp() / (x * x));
        let v = decide_quasiarithmetic(&g, &Interval::new(0.5, 3.0).unwrap(), &budget()).unwrap();
        assert_eq!(v.status, Status::Convex);
    }

    #[test]
    fn needs_derivatives() {
        let f = GeneratorSpec::new("x", Interval::real_line(), Monotonicity::Increasing, |x| x);
        assert!(matches!(
            decide_quasiarithmetic(&f, &Interval::real_line(), &budget()),
            Err(MeanError::Precondition(_))
        ));
    }
}
