//! Query workloads drawn from a dataset.
//!
//! * Group 1 (positive): one or two words of a row, each with up to two
//!   characters replaced by `_`, wrapped as `%w%` or `%w1%w2%`.
//! * Group 2 (positive): a row with `k` random characters deleted, 2 to 8
//!   `%` inserted between the remaining ones and the result wrapped in `%`.
//! * Group 3 (negative): like group 2 with 1 to 3 `%`, keeping only
//!   candidates that match no row.
//!
//! Randomness comes from ChaCha8 seeded with `seed + group`, so a given
//! dataset and spec always yield the same queries.

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::database::SequenceDatabase;
use crate::error::{Error, Result};
use crate::pattern::{is_pattern_char, like_matches, LikePredicate, ANY_ONE, ANY_RUN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryGroup {
    G1,
    G2,
    G3,
}

impl QueryGroup {
    pub const ALL: [QueryGroup; 3] = [QueryGroup::G1, QueryGroup::G2, QueryGroup::G3];

    pub fn number(self) -> u8 {
        match self {
            QueryGroup::G1 => 1,
            QueryGroup::G2 => 2,
            QueryGroup::G3 => 3,
        }
    }

    /// Groups 1 and 2 are built to match; group 3 to match nothing.
    pub fn is_positive(self) -> bool {
        self != QueryGroup::G3
    }
}

impl fmt::Display for QueryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for QueryGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(QueryGroup::G1),
            "2" => Ok(QueryGroup::G2),
            "3" => Ok(QueryGroup::G3),
            other => Err(Error::Config(format!("query group must be 1, 2 or 3, got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub group: QueryGroup,
    pub predicate: LikePredicate,
}

impl Query {
    pub fn new(group: QueryGroup, predicate: LikePredicate) -> Self {
        Query { group, predicate }
    }
}

/// How group-1 underscores are placed in a word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnderscoreMode {
    /// Overwrite a character, so the query still matches its source row.
    #[default]
    Replace,
    /// Insert between two characters, lengthening the word.
    Insert,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkloadSpec {
    /// Queries per group (candidates, for group 3).
    pub count: usize,
    pub word_length: RangeInclusive<usize>,
    pub underscores: RangeInclusive<usize>,
    pub underscore_mode: UnderscoreMode,
    /// Upper bound on literals in a group-1 query.
    pub max_group1_literals: usize,
    pub group2_percents: RangeInclusive<usize>,
    pub group3_percents: RangeInclusive<usize>,
    /// Characters that must survive deletion in groups 2 and 3.
    pub min_remaining: usize,
    pub seed: u64,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            count: 100,
            word_length: 5..=12,
            underscores: 0..=2,
            underscore_mode: UnderscoreMode::Replace,
            max_group1_literals: 17,
            group2_percents: 2..=8,
            group3_percents: 1..=3,
            min_remaining: 3,
            seed: 0,
        }
    }
}

impl WorkloadSpec {
    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    fn validate(&self) -> Result<()> {
        let ranges = [
            ("word_length", &self.word_length),
            ("underscores", &self.underscores),
            ("group2_percents", &self.group2_percents),
            ("group3_percents", &self.group3_percents),
        ];
        for (name, r) in ranges {
            if r.is_empty() {
                return Err(Error::Config(format!("{name} range is empty")));
            }
        }
        if *self.word_length.start() == 0 || self.min_remaining == 0 {
            return Err(Error::Config("lengths must be positive".into()));
        }
        Ok(())
    }

    fn rng(&self, group: QueryGroup) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(group.number() as u64))
    }
}

pub fn generate(db: &SequenceDatabase, group: QueryGroup, spec: &WorkloadSpec) -> Result<Vec<LikePredicate>> {
    match group {
        QueryGroup::G1 => gen_group1(db, spec),
        QueryGroup::G2 => gen_group2(db, spec),
        QueryGroup::G3 => gen_group3(db, spec),
    }
}

fn usable(c: char) -> bool {
    is_pattern_char(c) && !c.is_whitespace()
}

pub fn gen_group1(db: &SequenceDatabase, spec: &WorkloadSpec) -> Result<Vec<LikePredicate>> {
    spec.validate()?;
    // (row, word) pairs; each entry also remembers the next usable word
    // of the same row.
    let mut words: Vec<(Vec<char>, Option<Vec<char>>)> = Vec::new();
    for row in db.rows() {
        let ok: Vec<Vec<char>> = row
            .split_whitespace()
            .map(|w| w.chars().collect::<Vec<char>>())
            .filter(|w| spec.word_length.contains(&w.len()) && w.iter().all(|&c| usable(c)))
            .collect();
        for (i, w) in ok.iter().enumerate() {
            words.push((w.clone(), ok.get(i + 1).cloned()));
        }
    }
    if words.is_empty() {
        return Err(Error::Generation(format!(
            "no words with {}..={} pattern characters",
            spec.word_length.start(),
            spec.word_length.end()
        )));
    }
    let mut rng = spec.rng(QueryGroup::G1);
    let mut out = Vec::with_capacity(spec.count);
    while out.len() < spec.count {
        let (first, next) = words.choose(&mut rng).expect("non-empty");
        let mut picked = vec![first.clone()];
        if rng.gen_bool(0.5) {
            if let Some(second) = next {
                if first.len() + second.len() <= spec.max_group1_literals {
                    picked.push(second.clone());
                }
            }
        }
        let mut raw = String::from(ANY_RUN);
        for w in picked {
            let mut w = w;
            let n = rng.gen_range(spec.underscores.clone());
            match spec.underscore_mode {
                UnderscoreMode::Replace => {
                    let mut at: Vec<usize> = (0..w.len()).collect();
                    at.shuffle(&mut rng);
                    for &i in at.iter().take(n.min(w.len() - 1)) {
                        w[i] = ANY_ONE;
                    }
                }
                UnderscoreMode::Insert => {
                    for _ in 0..n {
                        let at = rng.gen_range(1..w.len());
                        w.insert(at, ANY_ONE);
                    }
                }
            }
            raw.extend(w);
            raw.push(ANY_RUN);
        }
        out.push(LikePredicate::parse(&raw)?);
    }
    Ok(out)
}

fn deletion_candidates(db: &SequenceDatabase, spec: &WorkloadSpec) -> Vec<Vec<char>> {
    let min_len = spec.min_remaining + 3;
    db.rows()
        .iter()
        .map(|r| r.chars().collect::<Vec<char>>())
        .filter(|r| r.len() >= min_len && r.iter().all(|&c| is_pattern_char(c)))
        .collect()
}

fn delete_and_insert(rng: &mut ChaCha8Rng, row: &[char], percents: &RangeInclusive<usize>, min_remaining: usize) -> String {
    let k = rng.gen_range(3..=row.len() - min_remaining);
    let mut keep: Vec<usize> = (0..row.len()).collect();
    keep.shuffle(rng);
    keep.truncate(row.len() - k);
    keep.sort_unstable();
    let kept: Vec<char> = keep.iter().map(|&i| row[i]).collect();
    // slots[i] counts the `%` placed before kept[i]; the first and last
    // positions are always wildcards.
    let mut slots = vec![0usize; kept.len() + 1];
    slots[0] = 1;
    slots[kept.len()] = 1;
    for _ in 0..rng.gen_range(percents.clone()) {
        slots[rng.gen_range(1..kept.len())] += 1;
    }
    let mut raw = String::new();
    for (i, n) in slots.iter().enumerate() {
        raw.extend(std::iter::repeat_n(ANY_RUN, *n));
        if let Some(&c) = kept.get(i) {
            raw.push(c);
        }
    }
    raw
}

pub fn gen_group2(db: &SequenceDatabase, spec: &WorkloadSpec) -> Result<Vec<LikePredicate>> {
    spec.validate()?;
    let rows = deletion_candidates(db, spec);
    if rows.is_empty() {
        return Err(Error::Generation(format!(
            "no rows with at least {} pattern characters",
            spec.min_remaining + 3
        )));
    }
    let mut rng = spec.rng(QueryGroup::G2);
    (0..spec.count)
        .map(|_| {
            let row = rows.choose(&mut rng).expect("non-empty");
            LikePredicate::parse(&delete_and_insert(&mut rng, row, &spec.group2_percents, spec.min_remaining))
        })
        .collect()
}

/// Draws `spec.count` candidates and keeps the true negatives, so the
/// result is usually much shorter than `spec.count`.
pub fn gen_group3(db: &SequenceDatabase, spec: &WorkloadSpec) -> Result<Vec<LikePredicate>> {
    spec.validate()?;
    let rows = deletion_candidates(db, spec);
    if rows.is_empty() {
        return Err(Error::Generation(format!(
            "no rows with at least {} pattern characters",
            spec.min_remaining + 3
        )));
    }
    let mut rng = spec.rng(QueryGroup::G3);
    let mut out = Vec::new();
    for _ in 0..spec.count {
        let row = rows.choose(&mut rng).expect("non-empty");
        let p = LikePredicate::parse(&delete_and_insert(&mut rng, row, &spec.group3_percents, spec.min_remaining))?;
        if !db.rows().iter().any(|r| like_matches(&p, r)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Writes queries one per line, each group introduced by `#group=N`.
pub fn write_queries<W: Write>(queries: &[Query], mut w: W) -> Result<()> {
    let mut current = None;
    for q in queries {
        let raw = q.predicate.raw();
        if raw.starts_with('#') || raw.contains('\n') || raw.trim().is_empty() {
            return Err(Error::Generation(format!("query {raw:?} cannot be stored in a query file")));
        }
        if current != Some(q.group) {
            writeln!(w, "#group={}", q.group)?;
            current = Some(q.group);
        }
        writeln!(w, "{raw}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a query file: blank lines and `#` comments are skipped, and
/// `#group=N` sets the group of the following queries (default 1).
pub fn read_queries<R: BufRead>(r: R) -> Result<Vec<Query>> {
    let mut group = QueryGroup::G1;
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(g) = comment.strip_prefix("group=") {
                group = g.parse().map_err(|e: Error| Error::format(i + 1, e.to_string()))?;
            }
            continue;
        }
        let p = LikePredicate::parse(line).map_err(|e| Error::format(i + 1, e.to_string()))?;
        out.push(Query::new(group, p));
    }
    Ok(out)
}
