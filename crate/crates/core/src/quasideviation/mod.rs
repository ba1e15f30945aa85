//! Quasideviations `E(x, u)` and the means they generate.

mod axioms;
mod derivative;

use std::fmt;
use std::sync::Arc;

use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, RealFn, WeightSpec};
use crate::interval::Interval;
use crate::means::{check_domain, constant_value, min_max, MeanFamily, MeanValue};
use crate::root::decreasing_sign_root;

pub use axioms::{check_axioms, Axiom, AxiomReport, AxiomWitness};
pub use derivative::{
    one_sided_derivatives, one_sided_partial, OneSidedDerivatives, OneSidedEstimate,
};

pub type RealFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Where a quasideviation came from, kept so deciders can use closed forms.
#[derive(Clone, Debug)]
pub enum Origin {
    Custom,
    /// `p(x) (f(x) - f(u))` with `f` increasing.
    Bajraktarevic {
        f: GeneratorSpec,
        p: WeightSpec,
    },
    /// `alpha E` below the diagonal, `beta E` above it.
    ScaleSplit {
        base: Arc<Quasideviation>,
        alpha: f64,
        beta: f64,
    },
    /// `-E / d2E(u,u)`.
    Normalized {
        base: Arc<Quasideviation>,
    },
    /// `E / d1E(u,u)` from one side.
    OneSided {
        base: Arc<Quasideviation>,
        side: Side,
    },
}

/// A function `E : I^2 -> R` meant to satisfy the quasideviation axioms:
/// sign `E(x,u) = sign(x - u)`, continuity in `u`, and for `x < y` the ratio
/// `E(x,u)/E(y,u)` strictly decreasing on `(x, y)`.
#[derive(Clone)]
pub struct Quasideviation {
    pub name: String,
    pub domain: Interval,
    eval: RealFn2,
    /// Analytic `dE/dx`.
    pub d1: Option<RealFn2>,
    /// Analytic `dE/du`.
    pub d2: Option<RealFn2>,
    /// Analytic `u -> dE/du (u, u)`; falls back to `d2` on the diagonal.
    pub diagonal_slope: Option<RealFn>,
    /// Analytic one-sided `u -> dE/dx (u, u)` from the left and right.
    pub diagonal_left: Option<RealFn>,
    pub diagonal_right: Option<RealFn>,
    /// Asserted by the caller: `E` is Gateaux differentiable on the diagonal
    /// and `u -> dE/dx (u, u)` is continuous. Not verified.
    pub gateaux_on_diagonal: bool,
    pub origin: Origin,
}

impl fmt::Debug for Quasideviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Quasideviation")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .field("gateaux_on_diagonal", &self.gateaux_on_diagonal)
            .finish()
    }
}

impl Quasideviation {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(eval),
            d1: None,
            d2: None,
            diagonal_slope: None,
            diagonal_left: None,
            diagonal_right: None,
            gateaux_on_diagonal: false,
            origin: Origin::Custom,
        }
    }

    /// Register `dE/dx`; it also provides both one-sided diagonal derivatives.
    pub fn with_d1(mut self, d1: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let d1: RealFn2 = Arc::new(d1);
        let diag: RealFn = {
            let d1 = d1.clone();
            Arc::new(move |u| d1(u, u))
        };
        self.diagonal_left = Some(diag.clone());
        self.diagonal_right = Some(diag);
        self.d1 = Some(d1);
        self
    }

    pub fn with_d2(mut self, d2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_gateaux(mut self, flag: bool) -> Self {
        self.gateaux_on_diagonal = flag;
        self
    }

    /// The canonical deviation `x - u` on `domain`.
    pub fn difference(domain: Interval) -> Self {
        Self::new("x-u", domain, |x, u| x - u)
            .with_d1(|_, _| 1.0)
            .with_d2(|_, _| -1.0)
            .with_gateaux(true)
    }

    /// The same function on a subinterval of its domain.
    pub fn restricted(&self, to: &Interval) -> Result<Quasideviation> {
        let domain = self.domain.intersect(to)?;
        Ok(Quasideviation {
            domain,
            ..self.clone()
        })
    }

    #[inline]
    pub fn eval(&self, x: f64, u: f64) -> f64 {
        (self.eval)(x, u)
    }

    /// `c E` for `c > 0`; generates the same mean.
    pub fn scaled(&self, c: f64) -> Result<Quasideviation> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(MeanError::InvalidParameter(format!(
                "scale must be positive, got {c}"
            )));
        }
        let e = self.eval.clone();
        let mut out =
            Quasideviation::new(format!("{c}*({})", self.name), self.domain, move |x, u| {
                c * e(x, u)
            });
        out.d1 = self
            .d1
            .clone()
            .map(|d| -> RealFn2 { Arc::new(move |x, u| c * d(x, u)) });
        out.d2 = self
            .d2
            .clone()
            .map(|d| -> RealFn2 { Arc::new(move |x, u| c * d(x, u)) });
        let scale1 =
            |f: &Option<RealFn>| f.clone().map(|f| -> RealFn { Arc::new(move |u| c * f(u)) });
        out.diagonal_slope = scale1(&self.diagonal_slope);
        out.diagonal_left = scale1(&self.diagonal_left);
        out.diagonal_right = scale1(&self.diagonal_right);
        out.gateaux_on_diagonal = self.gateaux_on_diagonal;
        Ok(out)
    }

    /// `dE/du (u, u)`: analytic when registered, otherwise an extrapolated
    /// central difference.
    pub fn diagonal_slope_at(&self, u: f64) -> f64 {
        if let Some(s) = &self.diagonal_slope {
            return s(u);
        }
        if let Some(d2) = &self.d2 {
            return d2(u, u);
        }
        let central = |h: f64| (self.eval(u, u + h) - self.eval(u, u - h)) / (2.0 * h);
        let h = self.stencil(u, 1e-4);
        (4.0 * central(h / 2.0) - central(h)) / 3.0
    }

    /// A step no larger than `rel * (1 + |u|)` that keeps `u +- h` inside the domain.
    pub(crate) fn stencil(&self, u: f64, rel: f64) -> f64 {
        let room = (u - self.domain.lo()).min(self.domain.hi() - u);
        (rel * (1.0 + u.abs())).min(0.5 * room)
    }
}

/// The mean `D_E(x)`: the unique `u` with `E(x_1,u) + ... + E(x_n,u) = 0`.
pub fn deviation_mean(e: &Quasideviation, x: &[f64]) -> Result<MeanValue> {
    check_domain(x, &e.domain)?;
    let finish = |value: f64| MeanValue {
        value,
        family: MeanFamily::Deviation,
        inputs: x.to_vec(),
    };
    if let Some(c) = constant_value(x) {
        return Ok(finish(c));
    }
    let (lo, hi) = min_max(x);
    let u = decreasing_sign_root(|u| x.iter().map(|&xi| e.eval(xi, u)).sum(), lo, hi)?;
    Ok(finish(u))
}

/// `E(x, u) = p(x) (f(x) - f(u))`, with `f` replaced by `-f` when decreasing
/// so that the sign axiom holds.
pub fn from_bajraktarevic(f: &GeneratorSpec, p: &WeightSpec) -> Result<Quasideviation> {
    let domain = f.domain.intersect(&p.domain)?;
    let f = f.increasing();
    let (fe, pe) = (f.eval.clone(), p.eval.clone());
    let name = format!("bajraktarevic({}, {})", f.name, p.name);
    let mut e = Quasideviation::new(name, domain, move |x, u| pe(x) * (fe(x) - fe(u)));
    if let Some(f1) = f.d1.clone() {
        let pe = p.eval.clone();
        e = e.with_d2(move |x, u| -pe(x) * f1(u));
        let (fe, pe, f1) = (
            f.eval.clone(),
            p.eval.clone(),
            f.d1.clone().expect("checked"),
        );
        match p.d1.clone() {
            Some(p1) => {
                e = e.with_d1(move |x, u| p1(x) * (fe(x) - fe(u)) + pe(x) * f1(x));
                e.gateaux_on_diagonal = true;
            }
            None if p.is_constant() => {
                e = e.with_d1(move |x, _| pe(x) * f1(x));
                e.gateaux_on_diagonal = true;
            }
            None => {}
        }
    }
    e.origin = Origin::Bajraktarevic { f, p: p.clone() };
    Ok(e)
}

/// `E*(x, u) = -E(x, u) / dE/du (u, u)`, whose diagonal slope is exactly `-1`.
pub fn normalize(e: &Quasideviation) -> Result<Quasideviation> {
    for u in e.domain.interior_grid(33) {
        let slope = e.diagonal_slope_at(u);
        if !(slope < 0.0 && slope.is_finite()) {
            return Err(MeanError::NotNormalizable { u, slope });
        }
    }
    let base = Arc::new(e.clone());
    let b = base.clone();
    let mut out = Quasideviation::new(format!("({})*", e.name), e.domain, move |x, u| {
        let v = b.eval(x, u);
        if v == 0.0 {
            0.0
        } else {
            -v / b.diagonal_slope_at(u)
        }
    });
    if let Some(d1) = e.d1.clone() {
        let b = base.clone();
        out = out.with_d1(move |x, u| -d1(x, u) / b.diagonal_slope_at(u));
    }
    if let (Some(l), Some(r)) = (e.diagonal_left.clone(), e.diagonal_right.clone()) {
        let (b1, b2) = (base.clone(), base.clone());
        out.diagonal_left = Some(Arc::new(move |u| -l(u) / b1.diagonal_slope_at(u)));
        out.diagonal_right = Some(Arc::new(move |u| -r(u) / b2.diagonal_slope_at(u)));
    }
    out.diagonal_slope = Some(Arc::new(|_| -1.0));
    out.gateaux_on_diagonal = e.gateaux_on_diagonal;
    out.origin = Origin::Normalized { base };
    Ok(out)
}

/// `E+(x, u) = E(x, u) / dE/dx+(u, u)` (or `E-` with the left derivative).
///
/// Fails with a precondition error if the one-sided derivative is not
/// positive at some grid point of the domain; that is a convexity signal.
pub fn normalized_plus(e: &Quasideviation, side: Side) -> Result<Quasideviation> {
    for u in e.domain.interior_grid(17) {
        let analytic = match side {
            Side::Left => &e.diagonal_left,
            Side::Right => &e.diagonal_right,
        };
        // A numeric estimate must clear its own error bar to count as positive.
        let (d, floor) = match analytic {
            Some(f) => (f(u), 0.0),
            None => {
                let est = one_sided_partial(e, u, side)?;
                (est.value, est.error)
            }
        };
        if !(d > floor) {
            return Err(MeanError::Precondition(format!(
                "one-sided derivative {side:?} at u = {u} is {d}, not positive"
            )));
        }
    }
    let base = Arc::new(e.clone());
    let b = base.clone();
    let tag = if side == Side::Right { "+" } else { "-" };
    let mut out = Quasideviation::new(format!("({}){tag}", e.name), e.domain, move |x, u| {
        let v = b.eval(x, u);
        if v == 0.0 {
            0.0
        } else {
            v / diagonal_derivative(&b, u, side).unwrap_or(f64::NAN)
        }
    });
    out.gateaux_on_diagonal = e.gateaux_on_diagonal;
    out.origin = Origin::OneSided { base, side };
    Ok(out)
}

/// One-sided `dE/dx (u, u)`: analytic when registered, numeric otherwise.
pub fn diagonal_derivative(e: &Quasideviation, u: f64, side: Side) -> Result<f64> {
    let analytic = match side {
        Side::Left => &e.diagonal_left,
        Side::Right => &e.diagonal_right,
    };
    match analytic {
        Some(f) => Ok(f(u)),
        None => one_sided_partial(e, u, side).map(|est| est.value),
    }
}

/// `E_{alpha,beta}`: `alpha E(x,u)` for `x <= u`, `beta E(x,u)` for `x > u`.
pub fn scale_split(e: &Quasideviation, alpha: f64, beta: f64) -> Result<Quasideviation> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MeanError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let base = Arc::new(e.clone());
    let b = base.clone();
    let mut out = Quasideviation::new(
        format!("split({}, {alpha}, {beta})", e.name),
        e.domain,
        move |x, u| {
            let v = b.eval(x, u);
            if x <= u {
                alpha * v
            } else {
                beta * v
            }
        },
    );
    let piecewise = |f: RealFn2| -> RealFn2 {
        Arc::new(move |x, u| {
            if x <= u {
                alpha * f(x, u)
            } else {
                beta * f(x, u)
            }
        })
    };
    out.d1 = e.d1.clone().map(piecewise);
    out.d2 = e.d2.clone().map(piecewise);
    if let Some(s) = e.diagonal_slope.clone() {
        // Along u at fixed x = u, the lower branch x <= u applies for u > x.
        out.diagonal_slope = Some(Arc::new(move |u| alpha * s(u)));
    }
    let (b1, b2) = (base.clone(), base.clone());
    out.diagonal_left = Some(Arc::new(move |u| {
        alpha * diagonal_derivative(&b1, u, Side::Left).unwrap_or(f64::NAN)
    }));
    out.diagonal_right = Some(Arc::new(move |u| {
        beta * diagonal_derivative(&b2, u, Side::Right).unwrap_or(f64::NAN)
    }));
    out.gateaux_on_diagonal = alpha == beta && e.gateaux_on_diagonal;
    out.origin = Origin::ScaleSplit { base, alpha, beta };
    Ok(out)
}
