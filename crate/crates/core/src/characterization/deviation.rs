//! Deciders for Bajraktarević means, scale splits `E_{a,b}` and general
//! quasideviation means.

use crate::catalog::FunctionExpr;
use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, WeightSpec};
use crate::interval::Interval;
use crate::lab::{
    bivariate_convexity_test, BajraktarevicMap, ConvexityVerdict, SearchBudget, Status,
};
use crate::quasideviation::{normalized_plus, one_sided_derivatives, Origin, Quasideviation, Side};

use super::gini::{decide_gini_global, decide_gini_subinterval};
use super::quasiarithmetic::decide_quasiarithmetic;

fn check_scales(alpha: f64, beta: f64) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MeanError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

/// Whether the one-sided diagonal derivatives of `e` agree at a few interior
/// points. A sanity check on the caller's Gateaux flag, nothing more.
fn diagonal_looks_smooth(e: &Quasideviation) -> bool {
    e.domain
        .interior_grid(5)
        .into_iter()
        .all(|u| match one_sided_derivatives(e, u) {
            Ok(d) => !d.are_distinct(),
            Err(_) => false,
        })
}

/// Convexity of the mean of `E_{alpha,beta}` given the status of the mean of `base`.
///
/// Convex when the base is convex and `alpha <= beta`. The converse needs a
/// base that is Gateaux differentiable on the diagonal; without the flag
/// only the sufficient direction is used.
pub fn decide_scale_split(
    base: &Quasideviation,
    base_status: Status,
    alpha: f64,
    beta: f64,
) -> Result<ConvexityVerdict> {
    check_scales(alpha, beta)?;
    if alpha == beta {
        return Ok(ConvexityVerdict::analytic(
            base_status,
            "scale-split-uniform",
        ));
    }
    let status = if base_status == Status::Convex && alpha <= beta {
        Status::Convex
    } else if base.gateaux_on_diagonal
        && diagonal_looks_smooth(base)
        && (base_status == Status::NotConvex || alpha > beta)
    {
        Status::NotConvex
    } else {
        Status::Inconclusive
    };
    Ok(ConvexityVerdict::analytic(status, "scale-split"))
}

/// The split of `f(x) - f(u)`: convex exactly when `alpha <= beta` and the
/// quasiarithmetic mean of `f` is convex.
pub fn decide_corollary_generator(
    f: &GeneratorSpec,
    alpha: f64,
    beta: f64,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    check_scales(alpha, beta)?;
    let qa = decide_quasiarithmetic(f, domain, budget)?;
    let status = match qa.status {
        Status::Convex if alpha <= beta => Status::Convex,
        Status::Convex | Status::NotConvex => Status::NotConvex,
        Status::Inconclusive if alpha > beta => Status::NotConvex,
        Status::Inconclusive => Status::Inconclusive,
    };
    Ok(ConvexityVerdict {
        status,
        witness: None,
        method: "corollary-generator".into(),
        samples_used: qa.samples_used,
        seed: qa.seed,
    })
}

/// Exponents `(q, r)` if `(f, p)` is the Bajraktarević pair of a Gini mean.
pub fn gini_exponents(f: &GeneratorSpec, p: &WeightSpec) -> Option<(f64, f64)> {
    let r = match p.expr? {
        FunctionExpr::Const(_) => 0.0,
        w => w.power_exponent()?,
    };
    match f.expr? {
        FunctionExpr::Log => Some((r, r)),
        g => g.power_exponent().map(|s| (s + r, r)),
    }
}

fn sample_map(
    f: &GeneratorSpec,
    p: &WeightSpec,
    on: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    let map = BajraktarevicMap::new(f.clone(), p.clone())?;
    bivariate_convexity_test(|x, u| map.value(x, u), on, on, budget)
}

/// Convexity of the Bajraktarević mean of `(f, p)` on `domain`.
///
/// Closed-form rules apply when `p` is constant (quasiarithmetic) or the pair
/// is a Gini pair. Otherwise the map `B(x,u) = p(x)(f(x)-f(u))/(p(u)f'(u))` is
/// sampled: a chord below its graph refutes convexity, and no chord leaves
/// the verdict `Inconclusive`. An analytic `NotConvex` is backed by a sampled
/// witness when one turns up within the budget.
pub fn decide_bajraktarevic(
    f: &GeneratorSpec,
    p: &WeightSpec,
    domain: &Interval,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    if f.d1.is_none() {
        return Err(MeanError::Precondition(format!(
            "{}: f' is required",
            f.name
        )));
    }
    let on = domain.intersect(&f.domain)?.intersect(&p.domain)?;
    f.check_nonvanishing_d1(&on, 257)?;

    let analytic = if p.is_constant() && f.d2.is_some() {
        Some(decide_quasiarithmetic(f, &on, budget)?)
    } else if let Some((q, r)) = gini_exponents(f, p) {
        let (a, b) = (on.lo().max(0.0), on.hi());
        Some(if a == 0.0 || b.is_infinite() {
            decide_gini_global(q, r)
        } else {
            decide_gini_subinterval(q, r, a, b)?.verdict
        })
    } else {
        None
    };

    match analytic {
        Some(v) if v.status != Status::NotConvex => Ok(v),
        Some(v) => {
            let sampled = sample_map(f, p, &on, budget)?;
            Ok(ConvexityVerdict {
                witness: sampled.witness,
                samples_used: v.samples_used + sampled.samples_used,
                seed: sampled.seed,
                ..v
            })
        }
        None => {
            let sampled = sample_map(f, p, &on, budget)?;
            Ok(ConvexityVerdict {
                method: "bajraktarevic-map".into(),
                ..sampled
            })
        }
    }
}

/// Convexity of the mean generated by `e`, dispatching on how `e` was built.
///
/// A custom quasideviation is tested through `E+ = E / dE/dx+(u,u)`: a
/// nonpositive one-sided derivative or a chord below the graph of `E+`
/// refutes convexity, and nothing else is concluded from sampling.
pub fn decide_quasideviation(
    e: &Quasideviation,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict> {
    match &e.origin {
        Origin::Bajraktarevic { f, p } => decide_bajraktarevic(f, p, &e.domain, budget),
        Origin::ScaleSplit { base, alpha, beta } => {
            let inner = decide_quasideviation(base, budget)?;
            let mut v = decide_scale_split(base, inner.status, *alpha, *beta)?;
            v.samples_used = inner.samples_used;
            v.seed = inner.seed;
            Ok(v)
        }
        Origin::Normalized { base } | Origin::OneSided { base, .. } => {
            decide_quasideviation(base, budget)
        }
        Origin::Custom => {
            let plus = match normalized_plus(e, Side::Right) {
                Ok(plus) => plus,
                Err(MeanError::Precondition(_)) => {
                    return Ok(ConvexityVerdict::analytic(
                        Status::NotConvex,
                        "one-sided-normalization",
                    ));
                }
                Err(MeanError::NonDifferentiable { .. }) => {
                    return Ok(ConvexityVerdict::analytic(
                        Status::Inconclusive,
                        "one-sided-normalization",
                    ));
                }
                Err(err) => return Err(err),
            };
            let sampled =
                bivariate_convexity_test(|x, u| Ok(plus.eval(x, u)), &e.domain, &e.domain, budget)?;
            Ok(ConvexityVerdict {
                method: "one-sided-normalization".into(),
                ..sampled
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasideviation::{from_bajraktarevic, scale_split};

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn budget() -> SearchBudget {
        SearchBudget::new(20_000, 2, 7)
    }

    fn pair(f: FunctionExpr, p: FunctionExpr) -> (GeneratorSpec, WeightSpec) {
        (f.to_generator().unwrap(), p.to_weight().unwrap())
    }

    fn arithmetic(domain: Interval) -> Quasideviation {
        let (f, p) = pair(FunctionExpr::Identity, FunctionExpr::Const(1.0));
        from_bajraktarevic(&f, &p)
            .unwrap()
            .restricted(&domain)
            .unwrap()
    }

    #[test]
    fn scale_split_examples() {
        let e = arithmetic(iv(0.0, 10.0));
        assert_eq!(
            decide_scale_split(&e, Status::Convex, 1.0, 2.0)
                .unwrap()
                .status,
            Status::Convex
        );
        assert_eq!(
            decide_scale_split(&e, Status::Convex, 2.0, 1.0)
                .unwrap()
                .status,
            Status::NotConvex
        );
        for s in [Status::Convex, Status::NotConvex, Status::Inconclusive] {
            assert_eq!(decide_scale_split(&e, s, 1.5, 1.5).unwrap().status, s);
        }
        assert!(decide_scale_split(&e, Status::Convex, 0.0, 1.0).is_err());
    }

    #[test]
    fn scale_split_without_smoothness_stays_one_sided() {
        let e = Quasideviation::new("x-u", iv(0.0, 10.0), |x, u| x - u);
        assert_eq!(
            decide_scale_split(&e, Status::Convex, 2.0, 1.0)
                .unwrap()
                .status,
            Status::Inconclusive
        );
        // Flag set, but the base has a kink on the diagonal.
        let kinked = scale_split(&arithmetic(iv(0.0, 10.0)), 1.0, 2.0)
            .unwrap()
            .with_gateaux(true);
        assert_eq!(
            decide_scale_split(&kinked, Status::Convex, 2.0, 1.0)
                .unwrap()
                .status,
            Status::Inconclusive
        );
    }

    #[test]
    fn corollary_examples() {
        let b = budget();
        let d = iv(0.1, 10.0);
        let id = FunctionExpr::Identity.to_generator().unwrap();
        let sqrt = FunctionExpr::Power(0.5).to_generator().unwrap();
        assert_eq!(
            decide_corollary_generator(&id, 1.0, 3.0, &d, &b)
                .unwrap()
                .status,
            Status::Convex
        );
        assert_eq!(
            decide_corollary_generator(&id, 3.0, 1.0, &d, &b)
                .unwrap()
                .status,
            Status::NotConvex
        );
        assert_eq!(
            decide_corollary_generator(&sqrt, 1.0, 2.0, &d, &b)
                .unwrap()
                .status,
            Status::NotConvex
        );
    }

    #[test]
    fn bajraktarevic_examples() {
        let b = budget();
        let (f, p) = pair(FunctionExpr::Identity, FunctionExpr::Const(1.0));
        let v = decide_bajraktarevic(&f, &p, &iv(0.0, 10.0), &b).unwrap();
        assert_eq!(v.status, Status::Convex);
        assert_eq!(v.method, "quasiarithmetic-linear");

        let (f, p) = pair(FunctionExpr::Power(-1.0), FunctionExpr::Power(3.0));
        assert_eq!(gini_exponents(&f, &p), Some((2.0, 3.0)));
        let v = decide_bajraktarevic(&f, &p, &iv(1.0, 2.9), &b).unwrap();
        assert_eq!(v.status, Status::Convex);
        assert_eq!(v.method, "gini-subinterval");

        let v =
            decide_bajraktarevic(&f, &p, &iv(1.0, 4.0), &SearchBudget::new(100_000, 2, 7)).unwrap();
        assert_eq!(v.status, Status::NotConvex);
        let w = v.witness.expect("sampled witness");
        assert!(w.margin > 0.0);
    }

    #[test]
    fn gini_global_on_unbounded_domain() {
        let (f, p) = pair(FunctionExpr::Identity, FunctionExpr::Identity);
        let v = decide_bajraktarevic(&f, &p, &Interval::positive(), &budget()).unwrap();
        assert_eq!(v.method, "gini-global");
        assert_eq!(v.status, Status::Convex);
    }

    #[test]
    fn non_gini_pair_is_sampled() {
        let (f, p) = pair(FunctionExpr::Exp(1.0), FunctionExpr::Identity);
        let v = decide_bajraktarevic(&f, &p, &iv(0.5, 3.0), &budget()).unwrap();
        assert_eq!(v.method, "bajraktarevic-map");
        assert_ne!(v.status, Status::Convex);
    }

    #[test]
    fn quasideviation_dispatch() {
        let b = budget();
        let e = arithmetic(iv(0.0, 10.0));
        assert_eq!(
            decide_quasideviation(&e, &b).unwrap().status,
            Status::Convex
        );
        let up = scale_split(&e, 1.0, 2.0).unwrap();
        assert_eq!(
            decide_quasideviation(&up, &b).unwrap().status,
            Status::Convex
        );
        let down = scale_split(&e, 2.0, 1.0).unwrap();
        assert_eq!(
            decide_quasideviation(&down, &b).unwrap().status,
            Status::NotConvex
        );

        let cube = Quasideviation::new("(x-u)^3", iv(0.0, 10.0), |x, u| (x - u).powi(3));
        assert_eq!(
            decide_quasideviation(&cube, &b).unwrap().status,
            Status::NotConvex
        );
        let plain = Quasideviation::new("x-u", iv(0.0, 10.0), |x, u| x - u);
        assert_eq!(
            decide_quasideviation(&plain, &b).unwrap().status,
            Status::Inconclusive
        );
    }
}
