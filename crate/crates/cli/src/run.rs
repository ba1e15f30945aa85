use std::fmt;
use std::sync::Arc;

use means_lab::characterization::{
    decide_bajraktarevic, decide_corollary_generator, decide_gini_global, decide_gini_subinterval,
    decide_gini_two_variable, decide_holder, decide_quasiarithmetic, decide_quasideviation,
};
use means_lab::crossval::{crossval_gini, crossval_holder, CrossvalConfig};
use means_lab::lab::jensen_falsify;
use means_lab::quasideviation::{from_bajraktarevic, scale_split};
use means_lab::{
    bajraktarevic_mean, deviation_mean, gini_mean, holder_mean, quasiarithmetic_mean,
    ConvexityVerdict, FunctionExpr, GiniParams, Interval, MeanError, Quasideviation, RunReport,
    SearchBudget,
};

use crate::args::{Command, CrossvalFamily, DecideTarget, MeanArgs, MeanKind};

pub enum CliError {
    /// Bad or missing arguments: exit code 2.
    Usage(String),
    /// The computation itself failed: exit code 3.
    Domain(MeanError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<MeanError> for CliError {
    fn from(e: MeanError) -> Self {
        CliError::Domain(e)
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn need<T: Copy>(v: Option<T>, flag: &str, mean: MeanKind) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for --mean {mean:?}").to_lowercase()))
}

/// Weights and generators are validated by their own parsers; realizing them
/// can still fail (e.g. `const` as a generator), which is a usage error.
fn generator(expr: FunctionExpr) -> Result<means_lab::GeneratorSpec, CliError> {
    expr.to_generator().map_err(|e| usage(e.to_string()))
}

fn weight(expr: FunctionExpr) -> Result<means_lab::WeightSpec, CliError> {
    expr.to_weight().map_err(|e| usage(e.to_string()))
}

type MeanFn = Arc<dyn Fn(&[f64]) -> means_lab::Result<f64> + Send + Sync>;

fn split_deviation(args: &MeanArgs) -> Result<Quasideviation, CliError> {
    let f = generator(args.generator.unwrap_or(FunctionExpr::Identity))?;
    let p = weight(args.weight.unwrap_or(FunctionExpr::Const(1.0)))?;
    let e = from_bajraktarevic(&f, &p)?;
    let alpha = need(args.alpha, "alpha", args.mean)?;
    let beta = need(args.beta, "beta", args.mean)?;
    scale_split(&e, alpha, beta).map_err(|e| usage(e.to_string()))
}

fn build_mean(args: &MeanArgs) -> Result<MeanFn, CliError> {
    let m = args.mean;
    Ok(match m {
        MeanKind::Holder => {
            let p = need(args.p, "p", m)?;
            Arc::new(move |x| Ok(holder_mean(p, x)?.value))
        }
        MeanKind::Quasiarithmetic => {
            let f = generator(need(args.generator, "generator", m)?)?;
            Arc::new(move |x| Ok(quasiarithmetic_mean(&f, x)?.value))
        }
        MeanKind::Gini => {
            let g = GiniParams::new(need(args.q, "q", m)?, need(args.r, "r", m)?)
                .map_err(|e| usage(e.to_string()))?;
            Arc::new(move |x| Ok(gini_mean(g, x)?.value))
        }
        MeanKind::Bajraktarevic => {
            let f = generator(need(args.generator, "generator", m)?)?;
            let p = weight(args.weight.unwrap_or(FunctionExpr::Const(1.0)))?;
            Arc::new(move |x| Ok(bajraktarevic_mean(&f, &p, x)?.value))
        }
        MeanKind::Deviation => {
            let f = generator(need(args.generator, "generator", m)?)?;
            let p = weight(args.weight.unwrap_or(FunctionExpr::Const(1.0)))?;
            let e = from_bajraktarevic(&f, &p)?;
            Arc::new(move |x| Ok(deviation_mean(&e, x)?.value))
        }
        MeanKind::ScaleSplit => {
            let e = split_deviation(args)?;
            Arc::new(move |x| Ok(deviation_mean(&e, x)?.value))
        }
    })
}

fn fill_verdict(report: &mut RunReport, v: ConvexityVerdict) {
    report.verdict = Some(v.status);
    report.method = Some(v.method);
    report.witness = v.witness;
    if v.seed.is_some() {
        report.samples_used = Some(v.samples_used);
        report.seed = v.seed;
    }
}

fn domain_or(interval: Option<Interval>, natural: Interval) -> Interval {
    interval.unwrap_or(natural)
}

/// Runs one command; returns the report and whether it counts as a success.
pub fn execute(command: &Command, seed: u64, report: &mut RunReport) -> Result<bool, CliError> {
    match command {
        Command::Eval(args) => {
            let mean = build_mean(&args.mean)?;
            report.value = Some(mean(&args.points)?);
            Ok(true)
        }
        Command::Decide(args) => {
            decide(&args.target, seed, report)?;
            Ok(true)
        }
        Command::Falsify(args) => {
            let mean = build_mean(&args.mean)?;
            let budget = SearchBudget::new(args.budget, args.nvars, seed).with_rounds(args.rounds);
            budget.validate().map_err(|e| usage(e.to_string()))?;
            let v = jensen_falsify(|x: &[f64]| mean(x), &args.interval, &budget)?;
            report.verdict = Some(v.status);
            report.method = Some(v.method);
            report.witness = v.witness;
            report.samples_used = Some(v.samples_used);
            report.seed = Some(seed);
            Ok(true)
        }
        Command::Crossval(args) => {
            let (family, common) = match &args.family {
                CrossvalFamily::Gini { common, .. } => ("gini", common),
                CrossvalFamily::Holder { common, .. } => ("holder", common),
            };
            let cfg = CrossvalConfig {
                budget: common.budget,
                arities: common.arities.clone(),
                seed,
            };
            let intervals: Vec<(f64, f64)> =
                common.interval.iter().map(|i| (i.lo(), i.hi())).collect();
            let rep = match &args.family {
                CrossvalFamily::Gini { q_grid, r_grid, .. } => {
                    crossval_gini(&q_grid.0, &r_grid.0, &intervals, &cfg)
                }
                CrossvalFamily::Holder { p_grid, .. } => {
                    crossval_holder(&p_grid.0, &intervals, &cfg)
                }
            }
            .map_err(|e| match e {
                MeanError::InvalidParameter(m) | MeanError::Precondition(m) => {
                    usage(format!("{family}: {m}"))
                }
                MeanError::InvalidInterval { .. } => usage(e.to_string()),
                other => CliError::Domain(other),
            })?;
            report.seed = Some(seed);
            report.samples_used = Some(
                rep.cells
                    .iter()
                    .flat_map(|c| c.falsifier.iter().map(|r| r.samples_used))
                    .sum(),
            );
            let clean = rep.is_clean();
            report.crossval = Some(rep);
            Ok(clean)
        }
    }
}

fn decide(target: &DecideTarget, seed: u64, report: &mut RunReport) -> Result<(), CliError> {
    let budget_of = |s: &crate::args::SearchArgs| -> Result<SearchBudget, CliError> {
        let b = SearchBudget::new(s.budget, s.nvars, seed);
        b.validate().map_err(|e| usage(e.to_string()))?;
        Ok(b)
    };
    match target {
        DecideTarget::Gini {
            q,
            r,
            interval,
            two_variable,
        } => match interval {
            Some(i) => {
                let d = decide_gini_subinterval(*q, *r, i.lo(), i.hi())
                    .map_err(|e| usage(e.to_string()))?;
                report.case_label = Some(d.case_label.label().to_string());
                report.beta = d.beta_value;
                report.gamma_second_derivative_min = d.gamma_second_derivative_min;
                fill_verdict(report, d.verdict);
            }
            None if *two_variable => fill_verdict(report, decide_gini_two_variable(*q, *r)),
            None => {
                report.beta = means_lab::characterization::beta(*q, *r);
                fill_verdict(report, decide_gini_global(*q, *r));
            }
        },
        DecideTarget::Holder { p } => fill_verdict(report, decide_holder(*p)),
        DecideTarget::Qa {
            generator: g,
            interval,
            search,
        } => {
            let f = generator(*g)?;
            let on = domain_or(*interval, f.domain);
            fill_verdict(
                report,
                decide_quasiarithmetic(&f, &on, &budget_of(search)?)?,
            );
        }
        DecideTarget::Bajraktarevic {
            generator: g,
            weight: w,
            interval,
            search,
        } => {
            let (f, p) = (generator(*g)?, weight(*w)?);
            let on = domain_or(*interval, f.domain.intersect(&p.domain)?);
            fill_verdict(
                report,
                decide_bajraktarevic(&f, &p, &on, &budget_of(search)?)?,
            );
        }
        DecideTarget::ScaleSplit {
            generator: g,
            weight: w,
            alpha,
            beta,
            interval,
            search,
        } => {
            let (f, p) = (generator(*g)?, weight(*w)?);
            let mut e = from_bajraktarevic(&f, &p)?;
            if let Some(i) = interval {
                e = e.restricted(i)?;
            }
            let split = scale_split(&e, *alpha, *beta).map_err(|e| usage(e.to_string()))?;
            fill_verdict(report, decide_quasideviation(&split, &budget_of(search)?)?);
        }
        DecideTarget::Corollary {
            generator: g,
            alpha,
            beta,
            interval,
            search,
        } => {
            let f = generator(*g)?;
            let on = domain_or(*interval, f.domain);
            fill_verdict(
                report,
                decide_corollary_generator(&f, *alpha, *beta, &on, &budget_of(search)?).map_err(
                    |e| match e {
                        MeanError::InvalidParameter(m) => usage(m),
                        other => CliError::Domain(other),
                    },
                )?,
            );
        }
    }
    Ok(())
}
