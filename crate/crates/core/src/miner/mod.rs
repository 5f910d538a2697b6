//! Closed positional sequence pattern mining.
//!
//! The miner grows patterns depth-first from frequent single characters.
//! Each prefix can be extended in two ways: a *gap* extension appends a new
//! one-character run (`A` → `A%C`), and an *adjacent* extension appends to
//! the last run (`A` → `AC`). Regular mode only uses gap extensions and so
//! reproduces classic closed sequential patterns.
//!
//! Closedness is decided from the data: a pattern is reported only when no
//! one-step specialization (one inserted character, or two runs merged)
//! keeps the same support. BackScan pruning skips gap subtrees that provably
//! contain no closed pattern.

mod brute;
mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::database::SequenceDatabase;
use crate::error::{Error, Result};
use crate::pattern::{is_pattern_char, PositionalPattern};

pub use brute::{brute_force_mine, BruteForceBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Positional,
    Regular,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Positional => "POSITIONAL",
            Mode::Regular => "REGULAR",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "POSITIONAL" => Ok(Mode::Positional),
            "REGULAR" => Ok(Mode::Regular),
            _ => Err(Error::Config(format!("unknown mining mode {s:?}"))),
        }
    }
}

/// What `mine` returns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Report {
    /// The frequent closed patterns.
    #[default]
    Closed,
    /// Every prefix the BIDE-style traversal visits, with the extension rule
    /// that keeps only the adjacent item when both groups tie and BackScan
    /// cutting whole subtrees. This is the listing the original BIDE
    /// extension prints for its running example; it contains non-closed
    /// prefixes.
    Visited,
}

/// Minimum support, either as a row count or as a fraction of |D|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minsup {
    Count(u64),
    Fraction(Ratio<u64>),
}

impl Minsup {
    /// Row-count threshold for a database of `db_size` rows. Fractions round
    /// up.
    pub fn resolve(&self, db_size: usize) -> Result<u64> {
        match *self {
            Minsup::Count(0) => Err(Error::Config("minsup must be at least 1".into())),
            Minsup::Count(n) => Ok(n),
            Minsup::Fraction(f) => {
                if *f.numer() == 0 || f > Ratio::from_integer(1) {
                    return Err(Error::Config(format!(
                        "minsup fraction {f} outside (0, 1]"
                    )));
                }
                let scaled = f * Ratio::from_integer(db_size as u64);
                Ok(scaled.ceil().to_integer().max(1))
            }
        }
    }
}

impl fmt::Display for Minsup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Minsup::Count(n) => write!(f, "{n}"),
            Minsup::Fraction(r) => write!(f, "{}", *r.numer() as f64 / *r.denom() as f64),
        }
    }
}

/// `"12"` is a row count, `"1.5%"` a percentage, `"0.015"` a fraction.
/// Decimal text is parsed exactly so the rounding of `ceil(f * |D|)` does not
/// depend on binary floating point.
impl FromStr for Minsup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse minsup {s:?}"));
        if let Some(pct) = s.strip_suffix('%') {
            let r = parse_decimal(pct.trim()).ok_or_else(bad)?;
            return Ok(Minsup::Fraction(r / Ratio::from_integer(100)));
        }
        if s.contains('.') {
            return Ok(Minsup::Fraction(parse_decimal(s).ok_or_else(bad)?));
        }
        s.parse::<u64>().map(Minsup::Count).map_err(|_| bad())
    }
}

fn parse_decimal(s: &str) -> Option<Ratio<u64>> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: u64 = digits.parse().ok()?;
    Some(Ratio::new(numer, 10u64.pow(frac.len() as u32)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinerConfig {
    pub minsup: Minsup,
    pub mode: Mode,
    pub backscan: bool,
    /// Report only patterns with at most this many literals. Closedness is
    /// still judged against the unbounded pattern space.
    pub max_pattern_literals: Option<usize>,
    pub report: Report,
}

impl MinerConfig {
    pub fn new(minsup: Minsup) -> Self {
        MinerConfig {
            minsup,
            mode: Mode::Positional,
            backscan: true,
            max_pattern_literals: None,
            report: Report::Closed,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn backscan(mut self, on: bool) -> Self {
        self.backscan = on;
        self
    }

    pub fn max_pattern_literals(mut self, cap: Option<usize>) -> Self {
        self.max_pattern_literals = cap;
        self
    }

    pub fn report(mut self, report: Report) -> Self {
        self.report = report;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinedPattern {
    pub pattern: PositionalPattern,
    pub frequency: u64,
}

impl MinedPattern {
    pub fn new(pattern: PositionalPattern, frequency: u64) -> Self {
        MinedPattern { pattern, frequency }
    }
}

impl fmt::Display for MinedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pattern, self.frequency)
    }
}

/// Miner output together with the parameters needed to interpret it.
/// Patterns are kept sorted and unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSet {
    pub db_size: usize,
    pub minsup_count: u64,
    pub mode: Mode,
    patterns: Vec<MinedPattern>,
}

impl PatternSet {
    pub fn new(db_size: usize, minsup_count: u64, mode: Mode, mut patterns: Vec<MinedPattern>) -> Self {
        patterns.sort();
        patterns.dedup();
        PatternSet {
            db_size,
            minsup_count,
            mode,
            patterns,
        }
    }

    pub fn patterns(&self) -> &[MinedPattern] {
        &self.patterns
    }

    pub fn into_patterns(self) -> Vec<MinedPattern> {
        self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn frequency_of(&self, pattern: &PositionalPattern) -> Option<u64> {
        self.patterns
            .binary_search_by(|m| m.pattern.cmp(pattern))
            .ok()
            .map(|i| self.patterns[i].frequency)
    }
}

/// Mines `db` according to `cfg`. A threshold above |D| yields an empty set.
pub fn mine(db: &SequenceDatabase, cfg: &MinerConfig) -> Result<PatternSet> {
    let minsup_count = cfg.minsup.resolve(db.size())?;
    let patterns = if db.is_empty() || minsup_count > db.size() as u64 {
        Vec::new()
    } else {
        search::Search::run(db, cfg, minsup_count)
    };
    Ok(PatternSet::new(db.size(), minsup_count, cfg.mode, patterns))
}

/// Characters occurring in at least `minsup_count` rows, with row counts.
pub fn frequent_length1(db: &SequenceDatabase, minsup_count: u64) -> Vec<(char, u64)> {
    db.alphabet()
        .into_iter()
        .filter(|&(c, n)| is_pattern_char(c) && n >= minsup_count)
        .collect()
}

/// Remainders of the rows containing `prefix`, each taken after the end of
/// the prefix's first (earliest-ending) instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedDatabase {
    prefix: PositionalPattern,
    projections: Vec<Projection>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub row: usize,
    pub suffix: String,
}

impl ProjectedDatabase {
    pub fn prefix(&self) -> &PositionalPattern {
        &self.prefix
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }
}

pub fn project(db: &SequenceDatabase, prefix: &PositionalPattern) -> ProjectedDatabase {
    let projections = db
        .rows()
        .iter()
        .enumerate()
        .filter_map(|(row, text)| {
            let mut rest = text.as_str();
            for run in prefix.runs() {
                let at = rest.find(run)?;
                rest = &rest[at + run.len()..];
            }
            Some(Projection {
                row,
                suffix: rest.to_string(),
            })
        })
        .collect();
    ProjectedDatabase {
        prefix: prefix.clone(),
        projections,
    }
}

/// Frequent extension items of a projected database.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalItems {
    /// Items occurring anywhere after the prefix (`P%c`).
    pub gap: BTreeMap<char, u64>,
    /// Items directly following the prefix's last character (`Pc`). Support
    /// is the full row count of the extended pattern, not just rows whose
    /// first instance happens to be followed by the item.
    pub adjacent: BTreeMap<char, u64>,
}

pub fn local_frequent_items(db: &SequenceDatabase, proj: &ProjectedDatabase, minsup_count: u64) -> LocalItems {
    let mut items = LocalItems::default();
    if proj.is_empty() {
        return items;
    }
    let mut gap: BTreeMap<char, u64> = BTreeMap::new();
    let mut seen = Vec::new();
    for p in proj.projections() {
        seen.clear();
        seen.extend(p.suffix.chars().filter(|&c| is_pattern_char(c)));
        seen.sort_unstable();
        seen.dedup();
        for &c in &seen {
            *gap.entry(c).or_default() += 1;
        }
    }
    items.gap = gap.into_iter().filter(|&(_, n)| n >= minsup_count).collect();

    let prefix = proj.prefix().as_str();
    let candidates: std::collections::BTreeSet<char> = proj
        .projections()
        .iter()
        .flat_map(|p| db.rows()[p.row].chars())
        .filter(|&c| is_pattern_char(c))
        .collect();
    for c in candidates {
        let extended: PositionalPattern = format!("{prefix}{c}").parse().expect("valid extension");
        let n = db.support(&extended);
        if n >= minsup_count {
            items.adjacent.insert(c, n);
        }
    }
    items
}

/// Which extensions of a prefix to grow for one local item.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionChoice {
    pub gap: bool,
    pub adjacent: bool,
}

/// Extension rule for an item seen in the gap group and/or the adjacent
/// group. When both groups hold the item at equal support, only the
/// adjacent extension is grown; `P%c` then has the same rows as `Pc` and is
/// not closed.
pub fn closure_extend(gap_freq: Option<u64>, adjacent_freq: Option<u64>, minsup_count: u64) -> ExtensionChoice {
    let gap = gap_freq.filter(|&f| f >= minsup_count);
    let adjacent = adjacent_freq.filter(|&f| f >= minsup_count);
    match (gap, adjacent) {
        (Some(g), Some(a)) if g == a => ExtensionChoice {
            gap: false,
            adjacent: true,
        },
        (g, a) => ExtensionChoice {
            gap: g.is_some(),
            adjacent: a.is_some(),
        },
    }
}

/// Closedness relative to a known pattern set: no other member is a
/// specialization of `candidate` with the same frequency.
pub fn closed_check(candidate: &MinedPattern, context: &[MinedPattern]) -> bool {
    !context.iter().any(|other| {
        other.frequency == candidate.frequency
            && other.pattern != candidate.pattern
            && candidate.pattern.subsumes(&other.pattern)
    })
}

/// Closedness decided directly from the data: true when no pattern one step
/// more specific than `pattern` (in the given mode) has the same support.
pub fn is_closed_in(db: &SequenceDatabase, pattern: &PositionalPattern, mode: Mode) -> bool {
    search::is_closed_in(db, pattern, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE_ROWS: [&str; 4] = ["ABCABE", "BCACDBE", "BACDCEDB", "ACECBE"];

    fn pat(s: &str) -> PositionalPattern {
        s.parse().unwrap()
    }

    fn as_map(set: &PatternSet) -> BTreeMap<String, u64> {
        set.patterns()
            .iter()
            .map(|m| (m.pattern.to_string(), m.frequency))
            .collect()
    }

    fn parse_listing(s: &str) -> BTreeMap<String, u64> {
        s.split(", ")
            .map(|e| {
                let (p, f) = e.rsplit_once(':').unwrap();
                (p.to_string(), f.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn minsup_parsing_and_resolution() {
        assert_eq!("3".parse::<Minsup>().unwrap(), Minsup::Count(3));
        let pct: Minsup = "1.5%".parse().unwrap();
        assert_eq!(pct, Minsup::Fraction(Ratio::new(15, 1000)));
        assert_eq!(pct.resolve(5000).unwrap(), 75);
        assert_eq!(pct.resolve(800_000).unwrap(), 12_000);
        assert_eq!("0.5".parse::<Minsup>().unwrap().resolve(7).unwrap(), 4);
        assert!(Minsup::Count(0).resolve(10).is_err());
        assert!("0%".parse::<Minsup>().unwrap().resolve(10).is_err());
        assert!("150%".parse::<Minsup>().unwrap().resolve(10).is_err());
        assert!("-3".parse::<Minsup>().is_err());
        assert!("abc".parse::<Minsup>().is_err());
    }

    #[test]
    fn sample_rows_closed_positional() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        let set = mine(&db, &MinerConfig::new(Minsup::Count(3))).unwrap();
        let expected = parse_listing(
            "A%C%BE:3, AC%B:3, AC%E:3, A%C%B:4, A%C%E:4, B%A%B:3, B%A%E:3, B%C%B:3, B%C%E:3, B%E:4, C%C%B:3, C%C%E:3",
        );
        assert_eq!(as_map(&set), expected);
    }

    #[test]
    fn sample_rows_closed_regular() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        let cfg = MinerConfig::new(Minsup::Count(3)).mode(Mode::Regular);
        let set = mine(&db, &cfg).unwrap();
        let expected = parse_listing(
            "A%C%B:4, A%C%B%E:3, A%C%E:4, B%A%B:3, B%A%E:3, B%C%B:3, B%C%E:3, B%E:4, C%C%B:3, C%C%E:3",
        );
        assert_eq!(as_map(&set), expected);
    }

    #[test]
    fn threshold_above_db_size_is_empty() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        let set = mine(&db, &MinerConfig::new(Minsup::Count(5))).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.minsup_count, 5);
    }

    #[test]
    fn zero_minsup_is_config_error() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        assert!(matches!(
            mine(&db, &MinerConfig::new(Minsup::Count(0))),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn frequent_length1_examples() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        assert_eq!(
            frequent_length1(&db, 3),
            vec![('A', 4), ('B', 4), ('C', 4), ('E', 4)]
        );
        // D occurs in rows 2 and 3 only.
        assert_eq!(db.alphabet()[&'D'], 2);
        assert!(frequent_length1(&SequenceDatabase::default(), 1).is_empty());
        assert_eq!(frequent_length1(&SequenceDatabase::new(["X"]), 1), vec![('X', 1)]);
    }

    #[test]
    fn projection_examples() {
        let db = SequenceDatabase::new(["ABCDAB", "ABCDAD", "CD"]);
        let proj = project(&db, &pat("CD"));
        let suffixes: Vec<&str> = proj.projections().iter().map(|p| p.suffix.as_str()).collect();
        assert_eq!(suffixes, ["AB", "AD", ""]);
    }

    #[test]
    fn local_items_for_prefix_a() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        let proj = project(&db, &pat("A"));
        let items = local_frequent_items(&db, &proj, 3);
        assert_eq!(items.gap.get(&'B'), Some(&4));
        assert_eq!(items.gap.get(&'C'), Some(&4));
        assert_eq!(items.gap.get(&'E'), Some(&4));
        assert_eq!(items.adjacent, BTreeMap::from([('C', 3)]));
    }

    #[test]
    fn local_items_for_prefix_ac_exclude_acd() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        // Independent scan: ACD is contiguous in rows 2 and 3 only.
        let acd = SAMPLE_ROWS.iter().filter(|r| r.contains("ACD")).count();
        assert_eq!(acd, 2);
        let items = local_frequent_items(&db, &project(&db, &pat("AC")), 3);
        assert!(!items.adjacent.contains_key(&'D'));
    }

    #[test]
    fn local_items_of_empty_projection() {
        let db = SequenceDatabase::new(SAMPLE_ROWS);
        let proj = project(&db, &pat("XYZ"));
        assert!(proj.is_empty());
        assert_eq!(local_frequent_items(&db, &proj, 1), LocalItems::default());
    }

    #[test]
    fn adjacent_support_sees_later_occurrences() {
        // The first instance of A is followed by B, the second by C.
        let db = SequenceDatabase::new(["ABAC", "ABAC"]);
        let items = local_frequent_items(&db, &project(&db, &pat("A")), 2);
        assert_eq!(items.adjacent.get(&'C'), Some(&2));
    }

    #[test]
    fn closure_extend_rule() {
        let both = |g, a| closure_extend(Some(g), Some(a), 3);
        assert_eq!(both(3, 3), ExtensionChoice { gap: false, adjacent: true });
        assert_eq!(both(4, 3), ExtensionChoice { gap: true, adjacent: true });
        assert_eq!(
            closure_extend(Some(4), None, 3),
            ExtensionChoice { gap: true, adjacent: false }
        );
        assert_eq!(
            closure_extend(Some(4), Some(2), 3),
            ExtensionChoice { gap: true, adjacent: false }
        );
    }

    #[test]
    fn closed_check_against_context() {
        let m = |p: &str, f| MinedPattern::new(PositionalPattern::regular(p).unwrap(), f);
        let ctx = vec![m("ABC", 5), m("ABBC", 5), m("ABB", 6)];
        assert!(!closed_check(&ctx[0], &ctx));
        assert!(closed_check(&ctx[2], &ctx));
        assert!(closed_check(&m("XY", 2), &[]));
    }

    #[test]
    fn data_driven_closedness() {
        let db = SequenceDatabase::new(["ABBC", "ABBC", "ABBC", "ABBC", "ABBC", "ABB"]);
        let reg = |p: &str| PositionalPattern::regular(p).unwrap();
        assert!(!is_closed_in(&db, &reg("ABC"), Mode::Regular));
        assert!(is_closed_in(&db, &reg("ABB"), Mode::Regular));
        assert!(is_closed_in(&db, &reg("ABBC"), Mode::Regular));
        // In positional mode ABB is the closure of A%B%B.
        assert!(!is_closed_in(&db, &reg("ABB"), Mode::Positional));
        assert!(is_closed_in(&db, &pat("ABB"), Mode::Positional));
    }

    #[test]
    fn equal_frequency_extension_rule_alone_loses_closed_patterns() {
        // A%B and AB have equal support, so the tie rule would never grow
        // A%B, yet A%BC is closed and only reachable through it.
        let db = SequenceDatabase::new(["AXBCAB", "ABC"]);
        let closed = mine(&db, &MinerConfig::new(Minsup::Count(2))).unwrap();
        assert_eq!(closed.frequency_of(&pat("A%BC")), Some(2));
        let visited = mine(&db, &MinerConfig::new(Minsup::Count(2)).report(Report::Visited)).unwrap();
        assert_eq!(visited.frequency_of(&pat("A%BC")), None);
    }
}
