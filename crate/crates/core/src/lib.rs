//! Selectivity estimation for SQL `LIKE` predicates from histograms of
//! positional sequence patterns.
//!
//! The pipeline is: load a [`SequenceDatabase`], [`mine`] its frequent
//! closed patterns, drop redundant ones and [`build`] a [`Histogram`], then
//! [`estimate`] predicates against it. [`metrics`] holds the full-scan
//! ground truth and [`workload`] the query generators used to evaluate
//! estimates.
//!
//! Estimates are generic over [`Scalar`]; [`Estimate`] and
//! [`ExactEstimate`] name the two usual choices.

pub mod database;
pub mod error;
pub mod estimator;
pub mod format;
pub mod histogram;
pub mod metrics;
pub mod miner;
pub mod pattern;
pub mod scalar;
pub mod synth;
pub mod workload;

pub use database::SequenceDatabase;
pub use error::{Error, Result};
pub use estimator::{estimate, EncapsulatedAggregate, EstimateResult, EstimatorConfig, MatchCase};
pub use histogram::{build, eliminate_redundant, Bucket, Histogram, HistogramMeta, RedundancyConfig};
pub use metrics::{evaluate, EvaluationConfig, EvaluationReport};
pub use miner::{mine, MinedPattern, MinerConfig, Minsup, Mode, PatternSet, Report};
pub use pattern::{LikePredicate, PositionalPattern, StripedSequence};
pub use scalar::Scalar;
pub use workload::{Query, QueryGroup, WorkloadSpec};

/// Exact rational selectivities.
pub type Rational = num_rational::Rational64;

/// Estimate with `f64` selectivity.
pub type Estimate = EstimateResult<f64>;
/// Estimate with exact rational selectivity.
pub type ExactEstimate = EstimateResult<Rational>;
/// Evaluation report with `f64` errors.
pub type Report64 = EvaluationReport<f64>;
/// Evaluation report with exact rational errors.
pub type ExactReport = EvaluationReport<Rational>;
