//! Grid cross-validation of analytic verdicts against the sampling falsifier.
//!
//! A cell agrees when an analytic `NotConvex` is backed by a witness at some
//! tested arity, or an analytic `Convex` meets no witness at any arity.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::characterization::{decide_gini_subinterval, decide_holder};
use crate::error::{MeanError, Result};
use crate::interval::Interval;
use crate::lab::{jensen_falsify, ConvexityVerdict, SearchBudget, Status, Witness};
use crate::means::{gini_mean, holder_mean, GiniParams};
use crate::report::{floats, opt_float};

/// Relative width of the band around `b/a` and `a/b` in which `beta` is too
/// close to the decision boundary for a sampled check to be meaningful.
pub const DEAD_ZONE: f64 = 0.03;

/// Parse `lo:hi:step` (inclusive of `hi` within 1e-12), a comma list, or a
/// single number. `lo > hi` gives an empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| MeanError::InvalidParameter(format!("grid `{spec}`: {m}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
                return Err(bad("need finite ends and a positive step"));
            }
            let mut out = Vec::new();
            let slack = 1e-12 * (1.0 + hi.abs());
            let mut k = 0u32;
            loop {
                let v = lo + step * f64::from(k);
                if v > hi + slack {
                    break;
                }
                out.push(if (v - hi).abs() <= slack { hi } else { v });
                k += 1;
                if k > 1_000_000 {
                    return Err(bad("more than a million points"));
                }
            }
            Ok(out)
        }
        [single] => single.split(',').map(num).collect(),
        _ => Err(bad("expected lo:hi:step")),
    }
}

/// `|beta - b/a| < 3% of b/a` or `|beta - a/b| < 3% of a/b`.
pub fn in_dead_zone(beta: Option<f64>, a: f64, b: f64) -> bool {
    let Some(beta) = beta else { return false };
    [b / a, a / b]
        .iter()
        .any(|&t| (beta - t).abs() < DEAD_ZONE * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellOutcome {
    Agree,
    Disagree,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArityRun {
    pub n_vars: usize,
    pub status: Status,
    pub samples_used: u64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossvalCell {
    #[serde(serialize_with = "floats")]
    pub params: Vec<f64>,
    #[serde(serialize_with = "floats")]
    pub interval: Vec<f64>,
    pub analytic: Status,
    pub method: String,
    pub case_label: Option<String>,
    #[serde(serialize_with = "opt_float")]
    pub beta: Option<f64>,
    pub dead_zone: bool,
    pub falsifier: Vec<ArityRun>,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossvalReport {
    pub family: String,
    pub parameter_names: Vec<String>,
    pub budget: u64,
    pub arities: Vec<usize>,
    pub seed: u64,
    pub cells: Vec<CrossvalCell>,
    pub agreed: usize,
    pub skipped: usize,
    /// Indices into `cells`.
    pub disagreements: Vec<usize>,
}

impl CrossvalReport {
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossvalConfig {
    pub budget: u64,
    pub arities: Vec<usize>,
    pub seed: u64,
}

impl CrossvalConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self {
            budget,
            arities: vec![2, 3],
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.arities.is_empty() {
            return Err(MeanError::InvalidParameter(
                "at least one arity is required".into(),
            ));
        }
        for &n in &self.arities {
            SearchBudget::new(self.budget, n, self.seed).validate()?;
        }
        Ok(())
    }
}

struct Job {
    params: Vec<f64>,
    interval: (f64, f64),
    analytic: ConvexityVerdict,
    case_label: Option<String>,
    beta: Option<f64>,
    dead_zone: bool,
}

fn run_cell<M>(job: Job, mean: M, cfg: &CrossvalConfig) -> Result<CrossvalCell>
where
    M: Fn(&[f64]) -> Result<f64> + Sync,
{
    let domain = Interval::new(job.interval.0, job.interval.1)?;
    let mut runs = Vec::new();
    if !job.dead_zone {
        for &n in &cfg.arities {
            let v = jensen_falsify(&mean, &domain, &SearchBudget::new(cfg.budget, n, cfg.seed))?;
            runs.push(ArityRun {
                n_vars: n,
                status: v.status,
                samples_used: v.samples_used,
                witness: v.witness,
            });
        }
    }
    let found = runs.iter().any(|r| r.status == Status::NotConvex);
    let outcome = match (job.dead_zone, job.analytic.status) {
        (true, _) | (false, Status::Inconclusive) => CellOutcome::Skipped,
        (false, Status::NotConvex) if found => CellOutcome::Agree,
        (false, Status::Convex) if !found => CellOutcome::Agree,
        _ => CellOutcome::Disagree,
    };
    Ok(CrossvalCell {
        params: job.params,
        interval: vec![job.interval.0, job.interval.1],
        analytic: job.analytic.status,
        method: job.analytic.method,
        case_label: job.case_label,
        beta: job.beta,
        dead_zone: job.dead_zone,
        falsifier: runs,
        outcome,
    })
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

fn assemble(
    family: &str,
    names: &[&str],
    cfg: &CrossvalConfig,
    mut cells: Vec<CrossvalCell>,
) -> CrossvalReport {
    cells.sort_by(|x, y| {
        lexicographic(&x.params, &y.params).then_with(|| lexicographic(&x.interval, &y.interval))
    });
    let disagreements = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.outcome == CellOutcome::Disagree)
        .map(|(i, _)| i)
        .collect();
    CrossvalReport {
        family: family.into(),
        parameter_names: names.iter().map(|s| s.to_string()).collect(),
        budget: cfg.budget,
        arities: cfg.arities.clone(),
        seed: cfg.seed,
        agreed: cells
            .iter()
            .filter(|c| c.outcome == CellOutcome::Agree)
            .count(),
        skipped: cells
            .iter()
            .filter(|c| c.outcome == CellOutcome::Skipped)
            .count(),
        cells,
        disagreements,
    }
}

/// Gini subinterval decisions against the falsifier on every
/// `(q, r, interval)` combination.
pub fn crossval_gini(
    q_grid: &[f64],
    r_grid: &[f64],
    intervals: &[(f64, f64)],
    cfg: &CrossvalConfig,
) -> Result<CrossvalReport> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for &(a, b) in intervals {
        for &q in q_grid {
            for &r in r_grid {
                let d = decide_gini_subinterval(q, r, a, b)?;
                jobs.push(Job {
                    params: vec![q, r],
                    interval: (a, b),
                    analytic: d.verdict,
                    case_label: Some(d.case_label.label().to_string()),
                    beta: d.beta_value,
                    dead_zone: in_dead_zone(d.beta_value, a, b),
                });
            }
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|job| {
            let g = GiniParams::new(job.params[0], job.params[1])?;
            run_cell(job, |x: &[f64]| Ok(gini_mean(g, x)?.value), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble("gini", &["q", "r"], cfg, cells))
}

/// Hölder decisions against the falsifier for every `(p, interval)`.
pub fn crossval_holder(
    p_grid: &[f64],
    intervals: &[(f64, f64)],
    cfg: &CrossvalConfig,
) -> Result<CrossvalReport> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for &(a, b) in intervals {
        Interval::new(a, b)?;
        for &p in p_grid {
            jobs.push(Job {
                params: vec![p],
                interval: (a, b),
                analytic: decide_holder(p),
                case_label: None,
                beta: None,
                dead_zone: false,
            });
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|job| {
            let p = job.params[0];
            run_cell(job, move |x: &[f64]| Ok(holder_mean(p, x)?.value), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble("holder", &["p"], cfg, cells))
}
