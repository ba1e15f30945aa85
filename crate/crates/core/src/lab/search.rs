//! The shared counterexample search: stratified random draws, then
//! golden-section polishing of each new record.
//!
//! Sample `k` is drawn from its own stream `mix(seed, k)`, draws are scored in
//! parallel chunks and then consumed in index order, so the outcome depends
//! only on the seed. Records are tracked on raw scores and refinement `j` runs
//! only if `j * cost` fits the reserve; both depend on the prefix alone, which
//! makes a larger budget replay every step of a smaller one.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{stream_rng, SearchBudget};
use crate::error::Result;

const CHUNK: u64 = 2048;
const WARMUP: u64 = 64;
const GOLDEN_EVALS: u64 = 14;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Result of scoring one candidate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scored {
    /// Violation minus the noise threshold; positive means a genuine violation.
    pub score: f64,
    /// Raw violation of the inequality.
    pub margin: f64,
}

impl Scored {
    const WORST: Scored = Scored {
        score: f64::NEG_INFINITY,
        margin: f64::NEG_INFINITY,
    };
}

pub(crate) struct Problem<'a> {
    /// Closed box each coordinate is kept in during refinement.
    pub bounds: Vec<(f64, f64)>,
    pub sample: &'a (dyn Fn(&mut ChaCha8Rng, u64) -> Vec<f64> + Sync),
    pub score: &'a (dyn Fn(&[f64]) -> Result<Scored> + Sync),
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub best: Option<(Vec<f64>, Scored)>,
    pub found: bool,
    pub samples_used: u64,
}

pub(crate) fn search(problem: &Problem<'_>, budget: &SearchBudget) -> Result<Outcome> {
    budget.validate()?;
    let dim = problem.bounds.len() as u64;
    let reserve = budget.max_samples / 4;
    let cost = u64::from(budget.refinement_rounds) * dim * GOLDEN_EVALS;

    let mut refine_used = 0u64;
    let mut refinements = 0u64;
    let mut record = Scored::WORST;
    let mut record_point: Option<Vec<f64>> = None;
    let mut pending = false;
    let mut best: Option<(Vec<f64>, Scored)> = None;
    let mut k = 0u64;

    let keep_best = |best: &mut Option<(Vec<f64>, Scored)>, p: &[f64], s: Scored| {
        if best.as_ref().is_none_or(|(_, b)| s.score > b.score) {
            *best = Some((p.to_vec(), s));
        }
    };

    while k + refine_used < budget.max_samples {
        let end = (k + CHUNK).min(budget.max_samples - refine_used);
        let drawn: Vec<(Vec<f64>, Scored)> = (k..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(budget.seed, i);
                let p = (problem.sample)(&mut rng, i);
                let s = sanitize((problem.score)(&p)?);
                Ok((p, s))
            })
            .collect::<Result<_>>()?;

        for (p, s) in drawn {
            if k + refine_used >= budget.max_samples {
                break;
            }
            k += 1;
            keep_best(&mut best, &p, s);
            if s.score > 0.0 {
                return Ok(Outcome {
                    best,
                    found: true,
                    samples_used: k + refine_used,
                });
            }
            if s.score > record.score {
                record = s;
                record_point = Some(p);
                pending = true;
            }
            if pending && k >= WARMUP && (refinements + 1) * cost <= reserve {
                pending = false;
                refinements += 1;
                let start = record_point.clone().expect("record exists when pending");
                let (q, sq, evals) = refine(problem, start, record, budget.refinement_rounds)?;
                refine_used += evals;
                keep_best(&mut best, &q, sq);
                if sq.score > 0.0 {
                    return Ok(Outcome {
                        best,
                        found: true,
                        samples_used: k + refine_used,
                    });
                }
            }
        }
    }
    Ok(Outcome {
        best,
        found: false,
        samples_used: k + refine_used,
    })
}

fn sanitize(s: Scored) -> Scored {
    if s.score.is_nan() {
        Scored::WORST
    } else {
        s
    }
}

/// Per-coordinate golden-section ascent on the score, `rounds` sweeps with a
/// radius shrinking by 4x per sweep. Returns the polished point, its score and
/// the number of evaluations spent (always `rounds * dim * GOLDEN_EVALS`).
fn refine(
    problem: &Problem<'_>,
    mut p: Vec<f64>,
    mut s: Scored,
    rounds: u32,
) -> Result<(Vec<f64>, Scored, u64)> {
    let mut evals = 0;
    for round in 0..rounds {
        let shrink = 0.25f64.powi(round as i32);
        for c in 0..p.len() {
            let (lo, hi) = problem.bounds[c];
            let radius = 0.1 * (hi - lo) * shrink;
            let a0 = (p[c] - radius).max(lo);
            let b0 = (p[c] + radius).min(hi);
            let at = |t: f64| -> Result<Scored> {
                let mut trial = p.clone();
                trial[c] = t;
                Ok(sanitize((problem.score)(&trial)?))
            };
            let (mut a, mut b) = (a0, b0);
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let mut s1 = at(x1)?;
            let mut s2 = at(x2)?;
            let mut local = if s1.score >= s2.score {
                (x1, s1)
            } else {
                (x2, s2)
            };
            for _ in 2..GOLDEN_EVALS {
                if s1.score >= s2.score {
                    b = x2;
                    x2 = x1;
                    s2 = s1;
                    x1 = b - INV_PHI * (b - a);
                    s1 = at(x1)?;
                    if s1.score > local.1.score {
                        local = (x1, s1);
                    }
                } else {
                    a = x1;
                    x1 = x2;
                    s1 = s2;
                    x2 = a + INV_PHI * (b - a);
                    s2 = at(x2)?;
                    if s2.score > local.1.score {
                        local = (x2, s2);
                    }
                }
            }
            evals += GOLDEN_EVALS;
            if local.1.score > s.score {
                p[c] = local.0;
                s = local.1;
                if s.score > 0.0 {
                    // Charge the full cost so the accounting stays prefix-stable.
                    return Ok((
                        p,
                        s,
                        u64::from(rounds) * problem.bounds.len() as u64 * GOLDEN_EVALS,
                    ));
                }
            }
        }
    }
    Ok((p, s, evals))
}
