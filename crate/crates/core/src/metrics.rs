//! Ground truth by full scan, error metrics and workload evaluation.

use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use crate::database::SequenceDatabase;
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorConfig, MatchCase};
use crate::histogram::Histogram;
use crate::pattern::{like_matches, LikePredicate};
use crate::scalar::Scalar;
use crate::workload::{Query, QueryGroup};

/// Positive queries whose true frequency is at most this are left out of
/// every aggregate.
pub const DEFAULT_EXCLUSION_THRESHOLD: u64 = 10;

/// Rows matching `p` under full LIKE semantics, as a count and a fraction
/// of |D| (0 for an empty database).
pub fn true_selectivity<S: Scalar>(p: &LikePredicate, db: &SequenceDatabase) -> (u64, S) {
    let count = db.rows().iter().filter(|r| like_matches(p, r)).count() as u64;
    let fraction = if db.is_empty() {
        S::zero()
    } else {
        S::ratio(count, db.size() as u64)
    };
    (count, fraction)
}

/// `|f_true - f_est| / f_true`, or `None` when `f_true` is zero.
pub fn relative_error<S: Scalar>(f_true: &S, f_est: &S) -> Option<S> {
    if f_true.is_zero() {
        None
    } else {
        Some(f_true.abs_diff(f_est) / f_true.clone())
    }
}

pub fn absolute_error<S: Scalar>(f_true: &S, f_est: &S) -> S {
    f_true.abs_diff(f_est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Relative,
    Absolute,
    /// Positive query too rare to score.
    Excluded,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Relative => "relative",
            ErrorKind::Absolute => "absolute",
            ErrorKind::Excluded => "excluded",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryRecord<S> {
    pub group: QueryGroup,
    pub pattern: String,
    pub true_count: u64,
    pub est_selectivity: S,
    pub match_case: MatchCase,
    pub error_kind: ErrorKind,
    pub error_value: Option<S>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupAggregate<S> {
    pub group: QueryGroup,
    pub queries: usize,
    pub excluded: usize,
    pub error_kind: ErrorKind,
    /// Mean error over the scored queries; `None` when none were scored.
    pub mean_error: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport<S> {
    pub records: Vec<QueryRecord<S>>,
    pub aggregates: Vec<GroupAggregate<S>>,
    /// Mean relative error over all scored positive queries.
    pub mean_relative_error: Option<S>,
    pub mean_estimate_time: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvaluationConfig {
    pub estimator: EstimatorConfig,
    pub exclusion_threshold: u64,
}

impl EvaluationConfig {
    pub fn new(estimator: EstimatorConfig) -> Self {
        EvaluationConfig {
            estimator,
            exclusion_threshold: DEFAULT_EXCLUSION_THRESHOLD,
        }
    }
}

/// Estimates and scores every query. Positive groups are scored by
/// relative error with rare queries excluded; the negative group by
/// absolute error.
pub fn evaluate<S: Scalar>(
    workload: &[Query],
    db: &SequenceDatabase,
    h: &Histogram,
    cfg: &EvaluationConfig,
) -> Result<EvaluationReport<S>> {
    if h.db_size() != db.size() as u64 {
        return Err(Error::Consistency(format!(
            "catalog was built for {} rows but the dataset has {}",
            h.db_size(),
            db.size()
        )));
    }
    cfg.estimator.validate()?;
    let mut records = Vec::with_capacity(workload.len());
    for q in workload {
        let start = Instant::now();
        let est = estimate::<S>(&q.predicate, h, &cfg.estimator);
        let elapsed = start.elapsed();
        let (true_count, f_true) = true_selectivity::<S>(&q.predicate, db);
        let (error_kind, error_value) = if q.group.is_positive() {
            if true_count <= cfg.exclusion_threshold {
                (ErrorKind::Excluded, None)
            } else {
                (ErrorKind::Relative, relative_error(&f_true, &est.selectivity))
            }
        } else {
            (ErrorKind::Absolute, Some(absolute_error(&f_true, &est.selectivity)))
        };
        records.push(QueryRecord {
            group: q.group,
            pattern: q.predicate.raw().to_string(),
            true_count,
            est_selectivity: est.selectivity,
            match_case: est.match_case,
            error_kind,
            error_value,
            elapsed,
        });
    }
    let aggregates = aggregate(&records);
    let mean_relative_error = mean(
        records
            .iter()
            .filter(|r| r.error_kind == ErrorKind::Relative)
            .filter_map(|r| r.error_value.clone()),
    );
    let mean_estimate_time = (!records.is_empty())
        .then(|| records.iter().map(|r| r.elapsed).sum::<Duration>() / records.len() as u32);
    Ok(EvaluationReport {
        records,
        aggregates,
        mean_relative_error,
        mean_estimate_time,
    })
}

/// Per-group aggregates, recomputable from the records alone.
pub fn aggregate<S: Scalar>(records: &[QueryRecord<S>]) -> Vec<GroupAggregate<S>> {
    let mut groups: Vec<QueryGroup> = records.iter().map(|r| r.group).collect();
    groups.sort();
    groups.dedup();
    groups
        .into_iter()
        .map(|group| {
            let in_group: Vec<&QueryRecord<S>> = records.iter().filter(|r| r.group == group).collect();
            let error_kind = if group.is_positive() {
                ErrorKind::Relative
            } else {
                ErrorKind::Absolute
            };
            GroupAggregate {
                group,
                queries: in_group.len(),
                excluded: in_group.iter().filter(|r| r.error_kind == ErrorKind::Excluded).count(),
                error_kind,
                mean_error: mean(
                    in_group
                        .iter()
                        .filter(|r| r.error_kind == error_kind)
                        .filter_map(|r| r.error_value.clone()),
                ),
            }
        })
        .collect()
}

fn mean<S: Scalar>(values: impl Iterator<Item = S>) -> Option<S> {
    let mut sum = S::zero();
    let mut n = 0u64;
    for v in values {
        sum = sum + v;
        n += 1;
    }
    (n > 0).then(|| sum / S::from_count(n))
}

impl<S: Scalar> EvaluationReport<S> {
    /// Tab-separated report. Timing is only written when asked for, so
    /// reports of identical runs are byte-identical by default.
    pub fn write_tsv<W: Write>(&self, mut w: W, with_timing: bool) -> Result<()> {
        writeln!(w, "group\tpattern\ttrue_count\test_selectivity\tmatch_case\terror_kind\terror_value")?;
        for r in &self.records {
            let value = r.error_value.as_ref().map_or_else(|| "-".to_string(), |v| v.to_string());
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.group, r.pattern, r.true_count, r.est_selectivity, r.match_case, r.error_kind, value
            )?;
        }
        for a in &self.aggregates {
            let value = a.mean_error.as_ref().map_or_else(|| "-".to_string(), |v| v.to_string());
            writeln!(
                w,
                "#AGG\tgroup={}\tqueries={}\texcluded={}\tmean_{}_error={}",
                a.group, a.queries, a.excluded, a.error_kind, value
            )?;
        }
        if let Some(v) = &self.mean_relative_error {
            writeln!(w, "#AGG\tgroup=positive\tmean_relative_error={v}")?;
        }
        if with_timing {
            if let Some(t) = self.mean_estimate_time {
                writeln!(w, "#AGG\tmean_estimate_time_us={:.3}", t.as_secs_f64() * 1e6)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
