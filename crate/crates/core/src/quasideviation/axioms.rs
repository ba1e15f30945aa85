//! Sampled checks of the quasideviation axioms. A pass only means that no
//! violation turned up within the budget.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Quasideviation;
use crate::lab::stream_rng;

const D3_GRID: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    /// sign E(x,u) = sign(x - u)
    Sign,
    /// u -> E(x,u) continuous
    Continuity,
    /// u -> E(x,u)/E(y,u) strictly decreasing on (x,y)
    RatioMonotone,
}

/// A violating tuple. `args` are the points (`[x, u]`, or `[x, y, u1, u2]`
/// for the ratio axiom) and `values` the function values observed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub axiom: Axiom,
    pub args: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub d1_pass: bool,
    pub d2_pass: bool,
    pub d3_pass: bool,
    /// Adjacent equal ratios on the grid: inconclusive for strictness.
    pub d3_ties: u64,
    pub counterexamples: Vec<AxiomWitness>,
    pub samples_used: u64,
    pub seed: u64,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.d1_pass && self.d2_pass && self.d3_pass
    }
}

/// Draws `budget` pairs from the domain and tests each axiom on them. Only the
/// first counterexample of each axiom is kept.
pub fn check_axioms(e: &Quasideviation, budget: u64, seed: u64) -> AxiomReport {
    let (lo, hi) = e.domain.window();
    let pad = 1e-9 * (hi - lo);
    let (lo, hi) = (lo + pad, hi - pad);
    let mut report = AxiomReport {
        d1_pass: true,
        d2_pass: true,
        d3_pass: true,
        d3_ties: 0,
        counterexamples: Vec::new(),
        samples_used: 0,
        seed,
    };
    for i in 0..budget {
        let mut rng = stream_rng(seed, i);
        let x = rng.random_range(lo..hi);
        let u = rng.random_range(lo..hi);
        report.samples_used += 1;

        if report.d1_pass {
            if let Some(w) = sign_violation(e, x, u).or_else(|| sign_violation(e, x, x)) {
                report.d1_pass = false;
                report.counterexamples.push(w);
            }
        }
        if report.d2_pass {
            let reach = 1e-3 * (hi - lo);
            // The diagonal is where a jump in u is most likely.
            if let Some(w) = jump(e, x, u, reach, lo, hi).or_else(|| jump(e, x, x, reach, lo, hi)) {
                report.d2_pass = false;
                report.counterexamples.push(w);
            }
        }
        if report.d3_pass && x != u {
            let (a, b) = if x < u { (x, u) } else { (u, x) };
            match ratio_violation(e, a, b) {
                Ratio::Fine => {}
                Ratio::Ties(t) => report.d3_ties += t,
                Ratio::Broken(w) => {
                    report.d3_pass = false;
                    report.counterexamples.push(w);
                }
            }
        }
    }
    report
}

fn sign_violation(e: &Quasideviation, x: f64, u: f64) -> Option<AxiomWitness> {
    let v = e.eval(x, u);
    let want = if x > u {
        1.0
    } else if x < u {
        -1.0
    } else {
        0.0
    };
    let got = if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else if v == 0.0 {
        0.0
    } else {
        f64::NAN
    };
    (got != want).then(|| AxiomWitness {
        axiom: Axiom::Sign,
        args: vec![x, u],
        values: vec![v],
    })
}

/// Flags `u0` when the oscillation of `E(x, .)` on `[u0 - d, u0 + d]` does not
/// shrink as `d` goes from `reach` to `reach / 1000`.
fn jump(e: &Quasideviation, x: f64, u0: f64, reach: f64, lo: f64, hi: f64) -> Option<AxiomWitness> {
    let reach = reach.min(u0 - lo).min(hi - u0);
    if !(reach > 0.0) {
        return None;
    }
    let centre = e.eval(x, u0);
    let osc = |d: f64| -> (f64, f64, f64) {
        let (a, b) = (e.eval(x, u0 - d), e.eval(x, u0 + d));
        ((a - centre).abs().max((b - centre).abs()), a, b)
    };
    let (wide, ..) = osc(reach);
    let (narrow, a, b) = osc(reach * 1e-3);
    let noise = 1e-9 * (1.0 + centre.abs());
    let broken = !narrow.is_finite() || (narrow > 0.5 * wide && narrow > noise);
    broken.then(|| AxiomWitness {
        axiom: Axiom::Continuity,
        args: vec![x, u0],
        values: vec![a, centre, b],
    })
}

enum Ratio {
    Fine,
    Ties(u64),
    Broken(AxiomWitness),
}

fn ratio_violation(e: &Quasideviation, x: f64, y: f64) -> Ratio {
    let step = (y - x) / (D3_GRID + 1) as f64;
    let ratio = |u: f64| e.eval(x, u) / e.eval(y, u);
    let mut ties = 0;
    let mut prev_u = x + step;
    let mut prev = ratio(prev_u);
    for k in 2..=D3_GRID {
        let u = x + step * k as f64;
        let r = ratio(u);
        if r > prev || r.is_nan() {
            return Ratio::Broken(AxiomWitness {
                axiom: Axiom::RatioMonotone,
                args: vec![x, y, prev_u, u],
                values: vec![prev, r],
            });
        }
        if r == prev {
            ties += 1;
        }
        prev = r;
        prev_u = u;
    }
    if ties > 0 {
        Ratio::Ties(ties)
    } else {
        Ratio::Fine
    }
}
