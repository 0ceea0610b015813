//! Confidence intervals for the occurrence probabilities of critical points
//! in ensembles of piecewise-linear scalar fields on 2D simplicial grids.
//!
//! The pipeline is: classify every vertex of every member ([`critical`]),
//! count occurrences per type, turn counts into point estimates and Jeffreys
//! intervals ([`stats`]), and draw sunburst glyph maps ([`render`]).
//! [`synth`] fits a multivariate normal model to a seed ensemble and draws
//! new ensembles or Monte-Carlo ground truth from it.

pub mod critical;
pub mod egf;
pub mod error;
pub mod export;
pub mod grid;
pub mod render;
pub mod stats;
pub mod synth;

pub use critical::{classify_field, classify_vertex, compare_vertices, count_types, CriticalType, TypeCounts};
pub use error::{Error, Result};
pub use grid::{build_link, Ensemble, GridTopology, ScalarField, VertexIndex, VertexLink};
pub use stats::{ConfidenceLevel, IntervalEstimate, ProbabilitySummary};
pub use synth::{MomentModel, Seed};
