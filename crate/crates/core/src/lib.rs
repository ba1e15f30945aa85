//! Generalized means and their Jensen convexity.
//!
//! * [`means`]: Hölder, quasiarithmetic, Gini and Bajraktarević means.
//! * [`quasideviation`]: quasideviations, their means and the constructions
//!   `E*`, `E+`, `E-` and the scale split `E_{a,b}`.
//! * [`lab`]: sampling oracles that can refute convexity.
//! * [`characterization`]: analytic decisions, the only source of `Convex`.
//! * [`crossval`] and [`report`]: grid cross-validation and JSON reports.

pub mod catalog;
pub mod characterization;
pub mod crossval;
pub mod error;
pub mod function;
pub mod interval;
pub mod lab;
pub mod means;
pub mod quasideviation;
pub mod report;
pub mod root;

pub use catalog::FunctionExpr;
pub use crossval::{CrossvalConfig, CrossvalReport};
pub use error::{MeanError, Result};
pub use function::{GeneratorSpec, Monotonicity, WeightSpec};
pub use interval::Interval;
pub use lab::{ConvexityVerdict, SearchBudget, Status, Witness};
pub use means::{
    bajraktarevic_mean, gini_mean, holder_mean, quasiarithmetic_mean, GiniParams, MeanFamily,
    MeanValue,
};
pub use quasideviation::{deviation_mean, Quasideviation, Side};
pub use report::RunReport;
