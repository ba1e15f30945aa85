//! Analytic convexity decisions. These are the only source of a `Convex`
//! verdict.

mod deviation;
mod gini;
mod quasiarithmetic;

pub use deviation::{
    decide_bajraktarevic, decide_corollary_generator, decide_quasideviation, decide_scale_split,
    gini_exponents,
};
pub use gini::{
    beta, decide_gini_global, decide_gini_subinterval, decide_gini_two_variable, decide_holder,
    gamma, gamma_second_derivative, GiniCase, GiniDecision,
};
pub use quasiarithmetic::decide_quasiarithmetic;
