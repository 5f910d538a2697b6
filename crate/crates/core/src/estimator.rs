//! LIKE selectivity estimation over a pattern histogram.
//!
//! Cases are tried in order and the first that applies wins:
//!
//! 1. exact: the canonical predicate is an endpoint;
//! 2. encapsulated: the predicate generalizes one or more endpoints;
//! 3. partitioned: the predicate is split at every token boundary and the
//!    sufficiently long parts are matched exactly or by encapsulation; the
//!    smallest frequency found is used;
//! 4. no match: `t%` of the minimum support count.
//!
//! Predicates without any literal match every row. The estimator treats
//! `_` like `%` and ignores anchoring; the oracle in [`crate::metrics`]
//! does not.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::histogram::{Bucket, Histogram, DEFAULT_T_PERCENT};
use crate::pattern::{canonicalize_tokens, pattern_subsumes, LikePredicate, PositionalPattern};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchCase {
    Exact,
    Encapsulated,
    Partitioned,
    NoMatch,
    MatchAll,
}

impl MatchCase {
    pub const ALL: [MatchCase; 5] = [
        MatchCase::Exact,
        MatchCase::Encapsulated,
        MatchCase::Partitioned,
        MatchCase::NoMatch,
        MatchCase::MatchAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchCase::Exact => "EXACT",
            MatchCase::Encapsulated => "ENCAPSULATED",
            MatchCase::Partitioned => "PARTITIONED",
            MatchCase::NoMatch => "NO_MATCH",
            MatchCase::MatchAll => "MATCH_ALL",
        }
    }
}

impl fmt::Display for MatchCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatchCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown match case {s:?}")))
    }
}

/// How the frequencies of all endpoints a whole predicate generalizes are
/// combined. Every such frequency is a lower bound on the predicate's true
/// frequency, so `Max` is the tightest; `Min` is the most conservative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EncapsulatedAggregate {
    #[default]
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// Parts with fewer than `n - epsilon` literals are ignored when
    /// partitioning a predicate with `n` literals.
    pub epsilon: usize,
    pub t_percent: f64,
    pub partitioning: bool,
    pub encapsulated_aggregate: EncapsulatedAggregate,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            epsilon: 1,
            t_percent: DEFAULT_T_PERCENT,
            partitioning: true,
            encapsulated_aggregate: EncapsulatedAggregate::Max,
        }
    }
}

impl EstimatorConfig {
    /// Defaults, with the no-match fraction stored in the catalog.
    pub fn for_histogram(h: &Histogram) -> Self {
        EstimatorConfig {
            t_percent: h.t_percent(),
            ..Self::default()
        }
    }

    pub fn epsilon(mut self, epsilon: usize) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn t_percent(mut self, t: f64) -> Self {
        self.t_percent = t;
        self
    }

    pub fn partitioning(mut self, on: bool) -> Self {
        self.partitioning = on;
        self
    }

    pub fn encapsulated_aggregate(mut self, agg: EncapsulatedAggregate) -> Self {
        self.encapsulated_aggregate = agg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_percent > 0.0 && self.t_percent <= 100.0) {
            return Err(Error::Config(format!("t_percent must be in (0, 100], got {}", self.t_percent)));
        }
        Ok(())
    }
}

/// The predicate part that produced a partitioned estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionWitness {
    /// Token index of the split: the parts are `tokens[..split]` and
    /// `tokens[split..]`.
    pub split: usize,
    pub part: PositionalPattern,
    pub part_case: MatchCase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateResult<S> {
    pub selectivity: S,
    pub match_case: MatchCase,
    /// Endpoint frequency the estimate was taken from, if any.
    pub frequency: Option<u64>,
    /// Endpoints consulted by the deciding case.
    pub witness: Vec<Bucket>,
    pub partition: Option<PartitionWitness>,
}

impl<S: Scalar> EstimateResult<S> {
    fn from_frequency(h: &Histogram, freq: u64, case: MatchCase, witness: Vec<Bucket>) -> Self {
        EstimateResult {
            selectivity: S::ratio(freq, h.db_size()),
            match_case: case,
            frequency: Some(freq),
            witness,
            partition: None,
        }
    }
}

/// Endpoint whose pattern equals `p`.
pub fn exact_match<'h>(p: &PositionalPattern, h: &'h Histogram) -> Option<&'h Bucket> {
    h.endpoint(p)
}

/// Endpoints that `p` generalizes, i.e. every row containing the endpoint
/// also contains `p`.
pub fn encapsulating_endpoints<'h>(p: &PositionalPattern, h: &'h Histogram) -> Vec<&'h Bucket> {
    h.buckets()
        .iter()
        .filter(|b| pattern_subsumes(p, &b.endpoint))
        .collect()
}

/// Aggregated frequency over the endpoints `p` generalizes, with the
/// endpoints themselves.
pub fn encapsulated_match<'h>(
    p: &PositionalPattern,
    h: &'h Histogram,
    agg: EncapsulatedAggregate,
) -> Option<(u64, Vec<&'h Bucket>)> {
    let set = encapsulating_endpoints(p, h);
    let freqs = set.iter().map(|b| b.frequency);
    let f = match agg {
        EncapsulatedAggregate::Max => freqs.max(),
        EncapsulatedAggregate::Min => freqs.min(),
    }?;
    Some((f, set))
}

/// Smallest matched frequency over the predicate's parts. A part's
/// frequency is its exact endpoint frequency, or else the smallest
/// frequency among the endpoints it generalizes.
pub fn partition_match(p: &LikePredicate, h: &Histogram, epsilon: usize) -> Option<(u64, PartitionWitness, Vec<Bucket>)> {
    let tokens = p.tokens();
    let n = p.literal_count();
    let min_literals = n.saturating_sub(epsilon).max(1);
    let mut best: Option<(u64, PartitionWitness, Vec<Bucket>)> = None;
    for split in 1..tokens.len() {
        for part_tokens in [&tokens[..split], &tokens[split..]] {
            let Ok(part) = canonicalize_tokens(part_tokens) else {
                continue;
            };
            if part.literal_count() < min_literals {
                continue;
            }
            let matched = match exact_match(&part, h) {
                Some(b) => Some((b.frequency, MatchCase::Exact, vec![b.clone()])),
                None => encapsulated_match(&part, h, EncapsulatedAggregate::Min)
                    .map(|(f, set)| (f, MatchCase::Encapsulated, set.into_iter().cloned().collect())),
            };
            if let Some((f, part_case, witness)) = matched {
                if best.as_ref().is_none_or(|(g, _, _)| f < *g) {
                    let w = PartitionWitness { split, part, part_case };
                    best = Some((f, w, witness));
                }
            }
        }
    }
    best
}

/// `(t / 100) * minsup_count / db_size`.
pub fn no_match_estimate<S: Scalar>(h: &Histogram, t_percent: f64) -> S {
    let t = S::from_f64(t_percent).expect("t_percent representable in scalar type");
    t * S::from_count(h.minsup_count()) / (S::from_count(100) * S::from_count(h.db_size()))
}

pub fn estimate<S: Scalar>(p: &LikePredicate, h: &Histogram, cfg: &EstimatorConfig) -> EstimateResult<S> {
    let canonical = match p.canonicalize() {
        Ok(c) => c,
        Err(_) => {
            return EstimateResult {
                selectivity: S::one(),
                match_case: MatchCase::MatchAll,
                frequency: None,
                witness: Vec::new(),
                partition: None,
            }
        }
    };
    if let Some(b) = exact_match(&canonical, h) {
        return EstimateResult::from_frequency(h, b.frequency, MatchCase::Exact, vec![b.clone()]);
    }
    if let Some((f, set)) = encapsulated_match(&canonical, h, cfg.encapsulated_aggregate) {
        let witness = set.into_iter().cloned().collect();
        return EstimateResult::from_frequency(h, f, MatchCase::Encapsulated, witness);
    }
    if cfg.partitioning {
        if let Some((f, part, witness)) = partition_match(p, h, cfg.epsilon) {
            let mut r = EstimateResult::from_frequency(h, f, MatchCase::Partitioned, witness);
            r.partition = Some(part);
            return r;
        }
    }
    EstimateResult {
        selectivity: no_match_estimate(h, cfg.t_percent),
        match_case: MatchCase::NoMatch,
        frequency: None,
        witness: Vec::new(),
        partition: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::read_catalog;
    use crate::histogram::HistogramMeta;
    use num_rational::Rational64;

    const SMALL_CATALOG: &str = "PSPH-HISTOGRAM v1\ndb_size=8\nminsup_count=2\nt_percent=10\nbuckets=4\n\
        20\tA%C%CB\t6\n36\tAC%CB\t3\n54\tC\t8\n74\tC%CB\t6\n";

    fn small_catalog() -> Histogram {
        read_catalog(SMALL_CATALOG.as_bytes()).unwrap()
    }

    fn pat(s: &str) -> PositionalPattern {
        s.parse().unwrap()
    }

    fn est(p: &str, cfg: &EstimatorConfig) -> EstimateResult<Rational64> {
        estimate(&p.parse().unwrap(), &small_catalog(), cfg)
    }

    #[test]
    fn worked_cases() {
        let cfg = EstimatorConfig::default();
        let cases = [
            ("AC%CB", Rational64::new(3, 8), MatchCase::Exact),
            ("%C%C%", Rational64::new(3, 4), MatchCase::Encapsulated),
            ("Z%CB", Rational64::new(3, 8), MatchCase::Partitioned),
            ("D%A%D%E", Rational64::new(1, 40), MatchCase::NoMatch),
        ];
        for (p, sel, case) in cases {
            let r = est(p, &cfg);
            assert_eq!((r.selectivity, r.match_case), (sel, case), "{p}");
        }
    }

    #[test]
    fn exact_match_is_canonical() {
        let h = small_catalog();
        assert_eq!(exact_match(&pat("AC%CB"), &h).unwrap().frequency, 3);
        let p: LikePredicate = "%AC%CB%".parse().unwrap();
        assert_eq!(exact_match(&p.canonicalize().unwrap(), &h).unwrap().frequency, 3);
        assert!(exact_match(&pat("AC%CA"), &h).is_none());
    }

    #[test]
    fn encapsulating_sets() {
        let h = small_catalog();
        let names = |p: &str| -> Vec<String> {
            encapsulating_endpoints(&pat(p), &h)
                .iter()
                .map(|b| b.endpoint.to_string())
                .collect()
        };
        assert_eq!(names("C%C"), ["A%C%CB", "AC%CB", "C%CB"]);
        assert_eq!(names("CB"), ["A%C%CB", "AC%CB", "C%CB"]);
        assert_eq!(names("CC"), Vec::<String>::new());
        let max = encapsulated_match(&pat("CB"), &h, EncapsulatedAggregate::Max).unwrap().0;
        let min = encapsulated_match(&pat("CB"), &h, EncapsulatedAggregate::Min).unwrap().0;
        assert_eq!((max, min), (6, 3));
    }

    #[test]
    fn exact_case_reports_single_witness() {
        let r = est("AC%CB", &EstimatorConfig::default());
        assert_eq!(r.witness.len(), 1);
        assert_eq!(r.frequency, Some(3));
    }

    #[test]
    fn partition_witness_names_the_part() {
        let r = est("Z%CB", &EstimatorConfig::default());
        let w = r.partition.unwrap();
        assert_eq!(w.part, pat("CB"));
        assert_eq!(w.part_case, MatchCase::Encapsulated);
    }

    #[test]
    fn epsilon_zero_disables_short_parts() {
        let r = est("Z%CB", &EstimatorConfig::default().epsilon(0));
        assert_eq!(r.match_case, MatchCase::NoMatch);
        assert!(partition_match(&"Z%CB".parse().unwrap(), &small_catalog(), 0).is_none());
        assert!(partition_match(&"D%A%D%E".parse().unwrap(), &small_catalog(), 1).is_none());
    }

    #[test]
    fn all_wildcards_match_everything() {
        for p in ["%", "%%", "_%", "_"] {
            let r = est(p, &EstimatorConfig::default());
            assert_eq!((r.selectivity, r.match_case), (Rational64::from_integer(1), MatchCase::MatchAll));
        }
    }

    #[test]
    fn no_match_arithmetic() {
        assert_eq!(no_match_estimate::<Rational64>(&small_catalog(), 10.0), Rational64::new(1, 40));
        let big = Histogram::from_parts(Vec::new(), HistogramMeta::new(800_000, 12_000), 1).unwrap();
        assert_eq!(no_match_estimate::<Rational64>(&big, 10.0), Rational64::new(3, 2000));
        assert_eq!(no_match_estimate::<Rational64>(&small_catalog(), 100.0), Rational64::new(2, 8));
        assert!((no_match_estimate::<f64>(&small_catalog(), 10.0) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn underscore_is_relaxed_to_gap() {
        let r = est("AC_CB", &EstimatorConfig::default());
        assert_eq!(r.match_case, MatchCase::Exact);
    }

    #[test]
    fn min_aggregate_is_available() {
        let cfg = EstimatorConfig::default().encapsulated_aggregate(EncapsulatedAggregate::Min);
        assert_eq!(est("%C%C%", &cfg).selectivity, Rational64::new(3, 8));
    }

    #[test]
    fn float_and_rational_agree() {
        for p in ["AC%CB", "%C%C%", "Z%CB", "D%A%D%E", "B%X"] {
            let exact = est(p, &EstimatorConfig::default());
            let float: EstimateResult<f64> = estimate(&p.parse().unwrap(), &small_catalog(), &EstimatorConfig::default());
            assert_eq!(exact.match_case, float.match_case);
            assert!((exact.selectivity.to_f64_lossy() - float.selectivity).abs() < 1e-12);
        }
    }
}
