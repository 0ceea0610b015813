//! Binomial point estimates, Jeffreys intervals and coverage validation.

mod coverage;
mod interval;
pub mod special;

pub use coverage::{coverage_experiment, CoverageReport};
pub use interval::{
    jeffreys_interval, point_estimate, summarize, ConfidenceLevel, IntervalEstimate, ProbabilitySummary,
};
pub use special::{beta_quantile, regularized_incomplete_beta};
