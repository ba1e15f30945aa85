//! Generating functions `f` and weight functions `p` with optional derivatives.

use std::fmt;
use std::sync::Arc;

use crate::catalog::FunctionExpr;
use crate::error::{MeanError, Result};
use crate::interval::Interval;

/// A shareable real function of one variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

impl Monotonicity {
    pub fn sign(self) -> f64 {
        match self {
            Monotonicity::Increasing => 1.0,
            Monotonicity::Decreasing => -1.0,
        }
    }
}

/// A continuous strictly monotone generator `f : I -> R`.
#[derive(Clone)]
pub struct GeneratorSpec {
    pub name: String,
    pub domain: Interval,
    pub monotonicity: Monotonicity,
    pub eval: RealFn,
    pub d1: Option<RealFn>,
    pub d2: Option<RealFn>,
    /// Closed-form inverse, used instead of bisection when present.
    pub inverse: Option<RealFn>,
    /// Catalog expression this generator was built from, if any.
    pub expr: Option<FunctionExpr>,
}

impl GeneratorSpec {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        monotonicity: Monotonicity,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            monotonicity,
            eval: Arc::new(eval),
            d1: None,
            d2: None,
            inverse: None,
            expr: None,
        }
    }

    pub fn with_d1(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Arc::new(d1));
        self
    }

    pub fn with_d2(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn with_expr(mut self, expr: FunctionExpr) -> Self {
        self.expr = Some(expr);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// The same mean generated by `-f`; flips monotonicity and all derivatives.
    pub fn negated(&self) -> GeneratorSpec {
        let neg = |g: &RealFn| -> RealFn {
            let g = g.clone();
            Arc::new(move |x| -g(x))
        };
        GeneratorSpec {
            name: format!("-({})", self.name),
            domain: self.domain,
            monotonicity: match self.monotonicity {
                Monotonicity::Increasing => Monotonicity::Decreasing,
                Monotonicity::Decreasing => Monotonicity::Increasing,
            },
            eval: neg(&self.eval),
            d1: self.d1.as_ref().map(neg),
            d2: self.d2.as_ref().map(neg),
            inverse: self
                .inverse
                .clone()
                .map(|inv| -> RealFn { Arc::new(move |y| inv(-y)) }),
            expr: None,
        }
    }

    /// Increasing representative: `f` itself, or `-f` if `f` is decreasing.
    pub fn increasing(&self) -> GeneratorSpec {
        match self.monotonicity {
            Monotonicity::Increasing => self.clone(),
            Monotonicity::Decreasing => self.negated(),
        }
    }

    /// Spot-check strict monotonicity on an interior grid of `points` nodes,
    /// restricted to `on` (which must lie inside the generator's domain).
    pub fn spot_check_monotone(&self, on: &Interval, points: usize) -> Result<()> {
        let grid = on.interior_grid(points.max(2));
        let s = self.monotonicity.sign();
        for w in grid.windows(2) {
            let (a, b) = (self.eval(w[0]), self.eval(w[1]));
            if !(s * (b - a) > 0.0) {
                return Err(MeanError::NotMonotone {
                    name: self.name.clone(),
                    lo: w[0],
                    hi: w[1],
                    f_lo: a,
                    f_hi: b,
                    target: f64::NAN,
                });
            }
        }
        Ok(())
    }

    /// Check the nonvanishing-first-derivative claim on a grid over `on`.
    pub fn check_nonvanishing_d1(&self, on: &Interval, points: usize) -> Result<()> {
        let d1 = self.d1.as_ref().ok_or_else(|| {
            MeanError::Precondition(format!("{}: first derivative not available", self.name))
        })?;
        for t in on.interior_grid(points) {
            let v = d1(t);
            if !(v.is_finite() && v != 0.0) {
                return Err(MeanError::Precondition(format!(
                    "{}: f'({t}) = {v} vanishes",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("monotonicity", &self.monotonicity)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .finish()
    }
}

/// A positive weight function `p : I -> (0, inf)`.
#[derive(Clone)]
pub struct WeightSpec {
    pub name: String,
    pub domain: Interval,
    pub eval: RealFn,
    pub d1: Option<RealFn>,
    pub expr: Option<FunctionExpr>,
}

impl WeightSpec {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(eval),
            d1: None,
            expr: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), Interval::real_line(), move |_| c)
            .with_d1(|_| 0.0)
            .with_expr(FunctionExpr::Const(c))
    }

    pub fn with_d1(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Arc::new(d1));
        self
    }

    pub fn with_expr(mut self, expr: FunctionExpr) -> Self {
        self.expr = Some(expr);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.expr, Some(FunctionExpr::Const(_)))
    }

    /// Spot-check positivity on an interior grid over `on`.
    pub fn spot_check_positive(&self, on: &Interval, points: usize) -> Result<()> {
        for t in on.interior_grid(points) {
            let v = self.eval(t);
            if !(v > 0.0 && v.is_finite()) {
                return Err(MeanError::Precondition(format!(
                    "weight {}({t}) = {v} is not positive",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("d1", &self.d1.is_some())
            .finish()
    }
}
