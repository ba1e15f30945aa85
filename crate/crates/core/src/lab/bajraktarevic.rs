use crate::error::{MeanError, Result};
use crate::function::{GeneratorSpec, RealFn, WeightSpec};
use crate::interval::Interval;

/// The two-variable map `B(x, u) = p(x) (f(x) - f(u)) / (p(u) f'(u))` whose
/// convexity on `I^2` is equivalent to Jensen convexity of the Bajraktarević
/// mean generated by `(f, p)`.
#[derive(Clone, Debug)]
pub struct BajraktarevicMap {
    pub f: GeneratorSpec,
    pub p: WeightSpec,
}

struct Parts<'a> {
    f1: &'a RealFn,
    f2: &'a RealFn,
    p1: &'a RealFn,
}

impl BajraktarevicMap {
    pub fn new(f: GeneratorSpec, p: WeightSpec) -> Result<Self> {
        if f.d1.is_none() {
            return Err(MeanError::Precondition(format!(
                "{}: f' is required",
                f.name
            )));
        }
        Ok(Self { f, p })
    }

    /// Common domain of `f` and `p`.
    pub fn domain(&self) -> Result<Interval> {
        self.f.domain.intersect(&self.p.domain)
    }

    fn parts(&self) -> Result<Parts<'_>> {
        let missing = |what: &str| {
            MeanError::Precondition(format!("{what} is required for the gradient of B"))
        };
        Ok(Parts {
            f1: self.f.d1.as_ref().ok_or_else(|| missing("f'"))?,
            f2: self.f.d2.as_ref().ok_or_else(|| missing("f''"))?,
            p1: self.p.d1.as_ref().ok_or_else(|| missing("p'"))?,
        })
    }

    fn slope(&self, u: f64) -> Result<f64> {
        let d = (self.f.d1.as_ref().expect("checked in new"))(u);
        if d == 0.0 || !d.is_finite() {
            return Err(MeanError::Precondition(format!("f'({u}) = {d} vanishes")));
        }
        Ok(d)
    }

    pub fn value(&self, x: f64, u: f64) -> Result<f64> {
        let fu = self.slope(u)?;
        Ok(self.p.eval(x) * (self.f.eval(x) - self.f.eval(u)) / (self.p.eval(u) * fu))
    }

    /// `(d/dx B, d/du B)` at `(x, u)`.
    pub fn gradient(&self, x: f64, u: f64) -> Result<[f64; 2]> {
        let Parts { f1, f2, p1 } = self.parts()?;
        let f1u = self.slope(u)?;
        let (px, pu) = (self.p.eval(x), self.p.eval(u));
        let (fx, fu) = (self.f.eval(x), self.f.eval(u));
        let d = pu * f1u;
        let dx = (p1(x) * fx + px * f1(x) - fu * p1(x)) / d;
        let d_prime = p1(u) * f1u + pu * f2(u);
        let du = px * ((fu - fx) * d_prime - d * f1u) / (d * d);
        Ok([dx, du])
    }
}
