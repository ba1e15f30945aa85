use thiserror::Error;

/// Everything that can go wrong while evaluating a mean or deciding its convexity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("input vector is empty")]
    EmptyInput,

    #[error("entry {index} = {value} is not strictly positive")]
    NonPositive { index: usize, value: f64 },

    #[error("entry {index} = {value} lies outside the domain {domain}")]
    OutOfDomain {
        index: usize,
        value: f64,
        domain: String,
    },

    #[error("invalid interval ({lo}, {hi}): need lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "{name} is not strictly monotone: f({lo}) = {f_lo}, f({hi}) = {f_hi}, target {target}"
    )]
    NotMonotone {
        name: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    /// The deviation sum does not change sign on `[min(x), max(x)]`, which
    /// a genuine quasideviation cannot produce.
    #[error("no sign change on [{lo}, {hi}]: sum is {g_lo} at lo and {g_hi} at hi")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("root solver did not converge within {iterations} iterations (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("non-finite value {value} produced at {at:?}")]
    NonFinite { at: Vec<f64>, value: f64 },

    #[error("not normalizable: the diagonal slope at u = {u} is {slope} (must be < 0)")]
    NotNormalizable { u: f64, slope: f64 },

    #[error("one-sided difference quotients diverge at u = {u}")]
    NonDifferentiable { u: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = MeanError> = std::result::Result<T, E>;
