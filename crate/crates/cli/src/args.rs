use clap::{Args, Parser, Subcommand, ValueEnum};
use means_lab::crossval::parse_grid;
use means_lab::{FunctionExpr, Interval};

#[derive(Debug, Parser)]
#[command(
    name = "means-lab",
    version,
    about = "Evaluate generalized means and test their Jensen convexity"
)]
pub struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, env = "MEANS_LAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Record wall time in `elapsed_ms` (reports are then not reproducible byte for byte).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a mean at a point.
    Eval(EvalArgs),
    /// Run an analytic convexity decision.
    Decide(DecideArgs),
    /// Search for a Jensen convexity counterexample.
    Falsify(FalsifyArgs),
    /// Compare analytic decisions with the falsifier over a parameter grid.
    Crossval(CrossvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanKind {
    Holder,
    #[value(alias = "qa")]
    Quasiarithmetic,
    Gini,
    Bajraktarevic,
    Deviation,
    ScaleSplit,
}

#[derive(Debug, Clone, Args)]
pub struct MeanArgs {
    #[arg(long, value_enum)]
    pub mean: MeanKind,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Generator f, e.g. `identity`, `power:3`, `log`, `exp:2`, `affine:2,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub generator: Option<FunctionExpr>,
    /// Weight p, e.g. `const:1`, `power:2`.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<FunctionExpr>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub mean: MeanArgs,
    /// Comma-separated input values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub points: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[command(subcommand)]
    pub target: DecideTarget,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Sample budget for any sampled step.
    #[arg(long, default_value_t = 20_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 2)]
    pub nvars: usize,
}

#[derive(Debug, Subcommand)]
pub enum DecideTarget {
    /// Gini mean: on `--interval` if given, otherwise on the whole half-line.
    Gini {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, value_parser = parse_interval)]
        interval: Option<Interval>,
        /// Decide the two-variable mean instead of every arity.
        #[arg(long, conflicts_with = "interval")]
        two_variable: bool,
    },
    /// Hölder (power) mean.
    Holder {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Quasiarithmetic mean of a generator.
    #[command(alias = "quasiarithmetic")]
    Qa {
        #[arg(long, allow_hyphen_values = true)]
        generator: FunctionExpr,
        #[arg(long, value_parser = parse_interval)]
        interval: Option<Interval>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bajraktarević mean of a generator and a weight.
    Bajraktarevic {
        #[arg(long, allow_hyphen_values = true)]
        generator: FunctionExpr,
        #[arg(long, allow_hyphen_values = true, default_value = "const:1")]
        weight: FunctionExpr,
        #[arg(long, value_parser = parse_interval)]
        interval: Option<Interval>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Scale split of the Bajraktarević deviation of a generator and weight.
    ScaleSplit {
        #[arg(long, allow_hyphen_values = true, default_value = "identity")]
        generator: FunctionExpr,
        #[arg(long, allow_hyphen_values = true, default_value = "const:1")]
        weight: FunctionExpr,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_parser = parse_interval)]
        interval: Option<Interval>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Scale split of `f(x) - f(u)` via the generator test.
    Corollary {
        #[arg(long, allow_hyphen_values = true)]
        generator: FunctionExpr,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_parser = parse_interval)]
        interval: Option<Interval>,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    #[command(flatten)]
    pub mean: MeanArgs,
    #[arg(long, value_parser = parse_interval)]
    pub interval: Interval,
    #[arg(long, default_value_t = 2)]
    pub nvars: usize,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 3)]
    pub rounds: u32,
}

#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

#[derive(Debug, Args)]
pub struct CrossvalArgs {
    #[command(subcommand)]
    pub family: CrossvalFamily,
}

#[derive(Debug, Clone, Args)]
pub struct CrossvalCommon {
    /// May be repeated.
    #[arg(long, value_parser = parse_interval, required = true)]
    pub interval: Vec<Interval>,
    #[arg(long, default_value_t = 20_000)]
    pub budget: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub arities: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CrossvalFamily {
    Gini {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_grid_arg)]
        q_grid: Grid,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_grid_arg)]
        r_grid: Grid,
        #[command(flatten)]
        common: CrossvalCommon,
    },
    Holder {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_grid_arg)]
        p_grid: Grid,
        #[command(flatten)]
        common: CrossvalCommon,
    },
}

/// `lo:hi`; `inf` and `-inf` are accepted as ends.
pub fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    Interval::new(num(lo)?, num(hi)?).map_err(|e| e.to_string())
}

fn parse_grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}
