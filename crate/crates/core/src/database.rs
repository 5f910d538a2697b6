use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::Result;
use crate::pattern::PositionalPattern;

/// The text column being summarized: one row per entry, duplicates allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SequenceDatabase {
    rows: Vec<String>,
}

impl SequenceDatabase {
    pub fn new<I, S>(rows: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SequenceDatabase {
            rows: rows.into_iter().map(Into::into).collect(),
        }
    }

    /// Reads one row per line. Empty lines are skipped and a trailing `\r`
    /// is dropped so CRLF files load the same as LF files.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if !line.is_empty() {
                rows.push(line.to_string());
            }
        }
        Ok(SequenceDatabase { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    /// |D|
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of distinct rows each character occurs in.
    pub fn alphabet(&self) -> BTreeMap<char, u64> {
        let mut counts = BTreeMap::new();
        let mut seen = Vec::new();
        for row in &self.rows {
            seen.clear();
            seen.extend(row.chars());
            seen.sort_unstable();
            seen.dedup();
            for &c in &seen {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn max_row_chars(&self) -> usize {
        self.rows.iter().map(|r| r.chars().count()).max().unwrap_or(0)
    }

    /// Number of rows positionally containing `pattern`.
    pub fn support(&self, pattern: &PositionalPattern) -> u64 {
        self.rows.iter().filter(|r| pattern.matches(r)).count() as u64
    }
}

impl<S: Into<String>> FromIterator<S> for SequenceDatabase {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        SequenceDatabase::new(iter)
    }
}
