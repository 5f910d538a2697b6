//! Pattern-based histograms.
//!
//! Mined patterns are sorted by the code-point order of their rendering and
//! scanned with a running frequency sum `S`. With total frequency `T` and
//! `b` requested buckets the capacity is `C = T / b`; whenever `S >= n * C`
//! the current pattern closes bucket `n` and `n` becomes `floor(S / C) + 1`.
//! The comparison is done on integers (`S * b >= n * T`), so no capacity
//! rounding ever moves an endpoint.

use std::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::miner::MinedPattern;
use crate::pattern::{pattern_contains, PositionalPattern};

/// Default information-content threshold for redundancy elimination.
pub const DEFAULT_DELTA: f64 = 0.00216;

/// Default no-match fraction, in percent of the minimum support count.
pub const DEFAULT_T_PERCENT: f64 = 10.0;

/// `-ln(freq / db_size)`.
pub fn information_content<F: Float>(freq: u64, db_size: u64) -> Result<F> {
    if freq == 0 || db_size == 0 || freq > db_size {
        return Err(Error::Domain(format!(
            "information content needs 1 <= freq <= db_size, got {freq}/{db_size}"
        )));
    }
    let f = F::from(freq).expect("count fits float");
    let d = F::from(db_size).expect("count fits float");
    Ok(-(f / d).ln())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedundancyConfig {
    pub delta: f64,
    pub enabled: bool,
}

impl Default for RedundancyConfig {
    fn default() -> Self {
        RedundancyConfig {
            delta: DEFAULT_DELTA,
            enabled: true,
        }
    }
}

impl RedundancyConfig {
    pub fn disabled() -> Self {
        RedundancyConfig {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn with_delta(delta: f64) -> Self {
        RedundancyConfig { delta, enabled: true }
    }
}

/// A pattern dropped as redundant, with the pattern that justified it.
#[derive(Clone, Debug, PartialEq)]
pub struct Removal {
    pub removed: MinedPattern,
    pub witness: MinedPattern,
    /// `IC(witness) - IC(removed)`, below the configured delta.
    pub ic_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Elimination {
    pub kept: Vec<MinedPattern>,
    pub removed: Vec<Removal>,
}

/// Drops every pattern `P` for which another pattern `R` of the input
/// striped-contains it with `IC(R) - IC(P) < delta`. Witnesses are searched
/// in the original input, so one removal never enables another. When
/// several witnesses exist the smallest in pattern order is recorded.
pub fn eliminate_redundant(patterns: &[MinedPattern], cfg: &RedundancyConfig, db_size: u64) -> Result<Elimination> {
    let mut sorted = patterns.to_vec();
    sorted.sort();
    sorted.dedup();
    if !cfg.enabled {
        return Ok(Elimination {
            kept: sorted,
            removed: Vec::new(),
        });
    }
    if !cfg.delta.is_finite() {
        return Err(Error::Config(format!("delta must be finite, got {}", cfg.delta)));
    }
    let ic: Vec<f64> = sorted
        .iter()
        .map(|m| information_content::<f64>(m.frequency, db_size))
        .collect::<Result<_>>()?;

    // Witness candidates for P are exactly the patterns with
    // IC(R) < IC(P) + delta: a prefix of the IC-ascending order. A
    // character bitmask and the striped length reject most of them cheaply.
    let striped: Vec<Vec<char>> = sorted.iter().map(|m| m.pattern.striped().chars().to_vec()).collect();
    let masks: Vec<u64> = striped
        .iter()
        .map(|s| s.iter().fold(0u64, |acc, &c| acc | 1 << (c as u32 % 64)))
        .collect();
    let mut by_ic: Vec<usize> = (0..sorted.len()).collect();
    by_ic.sort_by(|&a, &b| ic[a].total_cmp(&ic[b]));

    let mut out = Elimination::default();
    for (i, p) in sorted.iter().enumerate() {
        let limit = by_ic.partition_point(|&j| ic[j] - ic[i] < cfg.delta);
        let witness = by_ic[..limit]
            .iter()
            .copied()
            .filter(|&j| {
                j != i
                    && masks[i] & !masks[j] == 0
                    && striped[j].len() >= striped[i].len()
                    && sorted[j].pattern != p.pattern
                    && is_subsequence(&striped[i], &striped[j])
            })
            .min();
        match witness {
            Some(j) => {
                debug_assert!(pattern_contains(&sorted[j].pattern, &p.pattern));
                out.removed.push(Removal {
                    removed: p.clone(),
                    witness: sorted[j].clone(),
                    ic_difference: ic[j] - ic[i],
                })
            }
            None => out.kept.push(p.clone()),
        }
    }
    Ok(out)
}

fn is_subsequence(needle: &[char], hay: &[char]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|c| it.any(|h| h == c))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bucket {
    /// Running frequency sum at the moment this endpoint was selected.
    pub endpoint_number: u64,
    pub endpoint: PositionalPattern,
    pub frequency: u64,
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.endpoint_number, self.endpoint, self.frequency)
    }
}

/// Database-level facts stored alongside the buckets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramMeta {
    pub db_size: u64,
    pub minsup_count: u64,
    pub t_percent: f64,
}

impl HistogramMeta {
    pub fn new(db_size: u64, minsup_count: u64) -> Self {
        HistogramMeta {
            db_size,
            minsup_count,
            t_percent: DEFAULT_T_PERCENT,
        }
    }

    pub fn t_percent(mut self, t: f64) -> Self {
        self.t_percent = t;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    buckets: Vec<Bucket>,
    meta: HistogramMeta,
    bucket_count_requested: usize,
}

impl Histogram {
    /// Validating constructor, used by the loader and for hand-written
    /// catalogs: endpoints sorted and unique, endpoint numbers strictly
    /// increasing, frequencies between the minimum support and |D|.
    pub fn from_parts(buckets: Vec<Bucket>, meta: HistogramMeta, bucket_count_requested: usize) -> Result<Self> {
        if meta.db_size == 0 {
            return Err(Error::Build("db_size must be positive".into()));
        }
        if meta.minsup_count == 0 {
            return Err(Error::Build("minsup_count must be positive".into()));
        }
        if !(meta.t_percent > 0.0 && meta.t_percent <= 100.0) {
            return Err(Error::Build(format!("t_percent must be in (0, 100], got {}", meta.t_percent)));
        }
        if bucket_count_requested == 0 {
            return Err(Error::Build("bucket count must be positive".into()));
        }
        if buckets.len() > bucket_count_requested {
            return Err(Error::Build(format!(
                "{} buckets exceed the requested {}",
                buckets.len(),
                bucket_count_requested
            )));
        }
        for (i, b) in buckets.iter().enumerate() {
            if b.frequency < meta.minsup_count || b.frequency > meta.db_size {
                return Err(Error::Build(format!(
                    "bucket {}: frequency {} outside [{}, {}]",
                    i + 1,
                    b.frequency,
                    meta.minsup_count,
                    meta.db_size
                )));
            }
            if i > 0 {
                let prev = &buckets[i - 1];
                if b.endpoint_number <= prev.endpoint_number {
                    return Err(Error::Build(format!("bucket {}: endpoint numbers must increase", i + 1)));
                }
                if b.endpoint <= prev.endpoint {
                    return Err(Error::Build(format!("bucket {}: endpoints must be sorted and unique", i + 1)));
                }
            }
        }
        Ok(Histogram {
            buckets,
            meta,
            bucket_count_requested,
        })
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn meta(&self) -> &HistogramMeta {
        &self.meta
    }

    pub fn db_size(&self) -> u64 {
        self.meta.db_size
    }

    pub fn minsup_count(&self) -> u64 {
        self.meta.minsup_count
    }

    pub fn t_percent(&self) -> f64 {
        self.meta.t_percent
    }

    pub fn bucket_count_requested(&self) -> usize {
        self.bucket_count_requested
    }

    /// Endpoint with exactly this pattern.
    pub fn endpoint(&self, pattern: &PositionalPattern) -> Option<&Bucket> {
        self.buckets
            .binary_search_by(|b| b.endpoint.cmp(pattern))
            .ok()
            .map(|i| &self.buckets[i])
    }
}

/// Selects bucket endpoints from `patterns` by the running-sum rule.
///
/// When more buckets are requested than there are patterns, every pattern
/// becomes its own endpoint.
pub fn build(patterns: &[MinedPattern], bucket_count: usize, meta: HistogramMeta) -> Result<Histogram> {
    if patterns.is_empty() {
        return Err(Error::Build("no patterns to build a histogram from".into()));
    }
    if bucket_count == 0 {
        return Err(Error::Build("bucket count must be positive".into()));
    }
    let mut sorted = patterns.to_vec();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0].pattern == w[1].pattern {
            return Err(Error::Build(format!("pattern {} listed twice", w[0].pattern)));
        }
    }

    let mut buckets = Vec::new();
    if bucket_count > sorted.len() {
        let mut sum = 0u64;
        for m in sorted {
            sum += m.frequency;
            buckets.push(Bucket {
                endpoint_number: sum,
                endpoint: m.pattern,
                frequency: m.frequency,
            });
        }
    } else {
        let total: u128 = sorted.iter().map(|m| m.frequency as u128).sum();
        let b = bucket_count as u128;
        let mut sum = 0u128;
        let mut n = 1u128;
        for m in sorted {
            sum += m.frequency as u128;
            if sum * b >= n * total {
                buckets.push(Bucket {
                    endpoint_number: sum as u64,
                    endpoint: m.pattern,
                    frequency: m.frequency,
                });
                n = sum * b / total + 1;
            }
        }
    }
    Histogram::from_parts(buckets, meta, bucket_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: &str, f: u64) -> MinedPattern {
        MinedPattern::new(p.parse().unwrap(), f)
    }

    fn triples(h: &Histogram) -> Vec<(u64, String, u64)> {
        h.buckets()
            .iter()
            .map(|b| (b.endpoint_number, b.endpoint.to_string(), b.frequency))
            .collect()
    }

    fn twelve() -> Vec<MinedPattern> {
        [
            ("A%C%BE", 3),
            ("AC%B", 3),
            ("AC%E", 3),
            ("A%C%B", 4),
            ("A%C%E", 4),
            ("B%A%B", 3),
            ("B%A%E", 3),
            ("B%C%B", 3),
            ("B%C%E", 3),
            ("B%E", 4),
            ("C%C%B", 3),
            ("C%C%E", 3),
        ]
        .iter()
        .map(|&(p, f)| m(p, f))
        .collect()
    }

    #[test]
    fn information_content_values() {
        assert_eq!(information_content::<f64>(8, 8).unwrap(), 0.0);
        assert!((information_content::<f64>(4, 8).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        let v: f64 = information_content(1, 800_000).unwrap();
        assert!((v - 13.592).abs() < 1e-3);
        let v32: f32 = information_content(4, 8).unwrap();
        assert!((v32 - std::f32::consts::LN_2).abs() < 1e-6);
        assert!(information_content::<f64>(0, 8).is_err());
        assert!(information_content::<f64>(1, 0).is_err());
    }

    #[test]
    fn equal_frequency_contained_pattern_is_removed() {
        let e = eliminate_redundant(&[m("A%C%BE", 3), m("AC%B", 3)], &RedundancyConfig::default(), 4).unwrap();
        assert_eq!(e.kept, vec![m("A%C%BE", 3)]);
        assert_eq!(e.removed.len(), 1);
        assert_eq!(e.removed[0].removed, m("AC%B", 3));
        assert_eq!(e.removed[0].witness, m("A%C%BE", 3));
    }

    #[test]
    fn disabled_elimination_is_identity() {
        let input = twelve();
        let e = eliminate_redundant(&input, &RedundancyConfig::disabled(), 4).unwrap();
        let mut sorted = input;
        sorted.sort();
        assert_eq!(e.kept, sorted);
        assert!(e.removed.is_empty());
    }

    #[test]
    fn large_information_gap_keeps_pattern() {
        let e = eliminate_redundant(&[m("AB", 5), m("ABC", 2)], &RedundancyConfig::with_delta(0.5), 10).unwrap();
        assert_eq!(e.kept.len(), 2);
    }

    #[test]
    fn build_two_patterns() {
        let h = build(&[m("B", 4), m("A", 4)], 2, HistogramMeta::new(4, 1)).unwrap();
        assert_eq!(triples(&h), vec![(4, "A".into(), 4), (8, "B".into(), 4)]);
    }

    #[test]
    fn build_twelve_patterns_into_five_buckets() {
        let h = build(&twelve(), 5, HistogramMeta::new(4, 3)).unwrap();
        let expected = vec![
            (11, "A%C%E".to_string(), 4),
            (17, "AC%E".to_string(), 3),
            (26, "B%C%B".to_string(), 3),
            (33, "B%E".to_string(), 4),
            (39, "C%C%E".to_string(), 3),
        ];
        assert_eq!(triples(&h), expected);
    }

    #[test]
    fn single_pattern_single_bucket() {
        for b in [1, 3, 100] {
            let h = build(&[m("XY", 7)], b, HistogramMeta::new(10, 2)).unwrap();
            assert_eq!(triples(&h), vec![(7, "XY".into(), 7)]);
        }
    }

    #[test]
    fn more_buckets_than_patterns_uses_every_pattern() {
        let h = build(&twelve(), 20, HistogramMeta::new(4, 3)).unwrap();
        assert_eq!(h.buckets().len(), 12);
        assert_eq!(h.buckets().last().unwrap().endpoint_number, 39);
    }

    #[test]
    fn build_errors() {
        assert!(build(&[], 3, HistogramMeta::new(4, 1)).is_err());
        assert!(build(&[m("A", 1)], 0, HistogramMeta::new(4, 1)).is_err());
        assert!(build(&[m("A", 1), m("A", 1)], 2, HistogramMeta::new(4, 1)).is_err());
    }

    #[test]
    fn from_parts_validates() {
        let b = |n, p: &str, f| Bucket {
            endpoint_number: n,
            endpoint: p.parse().unwrap(),
            frequency: f,
        };
        let meta = HistogramMeta::new(8, 2);
        assert!(Histogram::from_parts(vec![b(20, "A%C%CB", 6), b(36, "AC%CB", 3)], meta, 4).is_ok());
        assert!(Histogram::from_parts(vec![b(36, "A%C%CB", 6), b(20, "AC%CB", 3)], meta, 4).is_err());
        assert!(Histogram::from_parts(vec![b(20, "AC%CB", 6), b(36, "A%C%CB", 3)], meta, 4).is_err());
        assert!(Histogram::from_parts(vec![b(20, "AC%CB", 1)], meta, 4).is_err());
        assert!(Histogram::from_parts(vec![b(1, "A", 2), b(2, "B", 2)], meta, 1).is_err());
    }
}
