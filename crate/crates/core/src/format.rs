//! Text formats for pattern sets and histogram catalogs.
//!
//! Both are UTF-8, LF-terminated, with a versioned magic line, `key=value`
//! header lines in a fixed order and tab-separated body lines. Writers are
//! deterministic, so `write(read(write(x))) == write(x)` byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::histogram::{Bucket, Histogram, HistogramMeta};
use crate::miner::{MinedPattern, Mode, PatternSet};
use crate::pattern::PositionalPattern;

pub const PATTERNS_MAGIC: &str = "PSPH-PATTERNS v1";
pub const HISTOGRAM_MAGIC: &str = "PSPH-HISTOGRAM v1";

pub fn write_patterns<W: Write>(set: &PatternSet, mut w: W) -> Result<()> {
    writeln!(w, "{PATTERNS_MAGIC}")?;
    writeln!(w, "minsup_count={}", set.minsup_count)?;
    writeln!(w, "db_size={}", set.db_size)?;
    writeln!(w, "mode={}", set.mode)?;
    for m in set.patterns() {
        writeln!(w, "{}\t{}", m.pattern, m.frequency)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_patterns<R: BufRead>(r: R) -> Result<PatternSet> {
    let mut lines = Lines::new(r);
    lines.magic(PATTERNS_MAGIC)?;
    let minsup_count: u64 = lines.header("minsup_count")?;
    let db_size: usize = lines.header("db_size")?;
    let mode: Mode = lines.header("mode")?;
    if minsup_count == 0 {
        return Err(Error::format(2, "minsup_count must be positive"));
    }
    let mut patterns = Vec::new();
    while let Some((no, line)) = lines.next_line()? {
        let fields: Vec<&str> = line.split('\t').collect();
        let [pattern, freq] = fields[..] else {
            return Err(Error::format(no, "expected <pattern>\\t<frequency>"));
        };
        let pattern: PositionalPattern = pattern.parse().map_err(|e| Error::format(no, format!("{e}")))?;
        let frequency: u64 = parse_field(no, "frequency", freq)?;
        if frequency < minsup_count || frequency > db_size as u64 {
            return Err(Error::format(
                no,
                format!("frequency {frequency} outside [{minsup_count}, {db_size}]"),
            ));
        }
        if mode == Mode::Regular && !pattern.is_regular() {
            return Err(Error::format(no, format!("{pattern} is not a regular pattern")));
        }
        patterns.push(MinedPattern::new(pattern, frequency));
    }
    let count = patterns.len();
    let set = PatternSet::new(db_size, minsup_count, mode, patterns);
    if set.len() != count {
        return Err(Error::format(0, "duplicate patterns"));
    }
    Ok(set)
}

pub fn save_patterns(set: &PatternSet, path: impl AsRef<Path>) -> Result<()> {
    write_patterns(set, BufWriter::new(File::create(path)?))
}

pub fn load_patterns(path: impl AsRef<Path>) -> Result<PatternSet> {
    read_patterns(BufReader::new(File::open(path)?))
}

pub fn write_catalog<W: Write>(h: &Histogram, mut w: W) -> Result<()> {
    writeln!(w, "{HISTOGRAM_MAGIC}")?;
    writeln!(w, "db_size={}", h.db_size())?;
    writeln!(w, "minsup_count={}", h.minsup_count())?;
    writeln!(w, "t_percent={}", h.t_percent())?;
    writeln!(w, "buckets={}", h.bucket_count_requested())?;
    for b in h.buckets() {
        writeln!(w, "{}\t{}\t{}", b.endpoint_number, b.endpoint, b.frequency)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_catalog<R: BufRead>(r: R) -> Result<Histogram> {
    let mut lines = Lines::new(r);
    lines.magic(HISTOGRAM_MAGIC)?;
    let db_size: u64 = lines.header("db_size")?;
    let minsup_count: u64 = lines.header("minsup_count")?;
    let t_percent: f64 = lines.header("t_percent")?;
    let requested: usize = lines.header("buckets")?;
    let mut buckets = Vec::new();
    while let Some((no, line)) = lines.next_line()? {
        let fields: Vec<&str> = line.split('\t').collect();
        let [number, pattern, freq] = fields[..] else {
            return Err(Error::format(
                no,
                "expected <endpoint_number>\\t<pattern>\\t<endpoint_frequency>",
            ));
        };
        buckets.push(Bucket {
            endpoint_number: parse_field(no, "endpoint number", number)?,
            endpoint: pattern.parse().map_err(|e| Error::format(no, format!("{e}")))?,
            frequency: parse_field(no, "endpoint frequency", freq)?,
        });
    }
    let meta = HistogramMeta {
        db_size,
        minsup_count,
        t_percent,
    };
    Histogram::from_parts(buckets, meta, requested).map_err(|e| Error::format(0, e.to_string()))
}

pub fn save_catalog(h: &Histogram, path: impl AsRef<Path>) -> Result<()> {
    write_catalog(h, BufWriter::new(File::create(path)?))
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Histogram> {
    read_catalog(BufReader::new(File::open(path)?))
}

fn parse_field<T: FromStr>(line: usize, what: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::format(line, format!("invalid {what} {text:?}")))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Lines {
            inner: r.lines(),
            number: 0,
        }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        match self.inner.next() {
            None => Ok(None),
            Some(line) => {
                self.number += 1;
                Ok(Some((self.number, line?)))
            }
        }
    }

    fn magic(&mut self, expected: &str) -> Result<()> {
        match self.next_line()? {
            Some((_, line)) if line == expected => Ok(()),
            Some((_, line)) => Err(Error::UnsupportedVersion(line)),
            None => Err(Error::format(1, "empty file")),
        }
    }

    fn header<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let Some((no, line)) = self.next_line()? else {
            return Err(Error::format(self.number + 1, format!("missing {key}=")));
        };
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| Error::format(no, format!("expected {key}=<value>")))?;
        parse_field(no, key, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_CATALOG: &str = "PSPH-HISTOGRAM v1\ndb_size=8\nminsup_count=2\nt_percent=10\nbuckets=4\n\
        20\tA%C%CB\t6\n36\tAC%CB\t3\n54\tC\t8\n74\tC%CB\t6\n";

    #[test]
    fn catalog_round_trip_is_byte_exact() {
        let h = read_catalog(SMALL_CATALOG.as_bytes()).unwrap();
        assert_eq!(h.buckets().len(), 4);
        let mut out = Vec::new();
        write_catalog(&h, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), SMALL_CATALOG);
        assert_eq!(read_catalog(&out[..]).unwrap(), h);
    }

    #[test]
    fn fractional_t_percent_round_trips() {
        let text = SMALL_CATALOG.replace("t_percent=10", "t_percent=0.30000000000000004");
        let h = read_catalog(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_catalog(&h, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn unknown_header_is_unsupported_version() {
        let text = SMALL_CATALOG.replace("v1", "v2");
        assert!(matches!(read_catalog(text.as_bytes()), Err(Error::UnsupportedVersion(_))));
        assert!(matches!(
            read_patterns("hello\n".as_bytes()),
            Err(Error::UnsupportedVersion(_))
        ));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let text = SMALL_CATALOG.replace("36\tAC%CB\t3", "36\tAC%CB");
        match read_catalog(text.as_bytes()) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
        let text = SMALL_CATALOG.replace("minsup_count=2", "minsup=2");
        assert!(matches!(read_catalog(text.as_bytes()), Err(Error::Format { line: 3, .. })));
        let text = SMALL_CATALOG.replace("36\tAC%CB", "36\t%AC%CB");
        assert!(matches!(read_catalog(text.as_bytes()), Err(Error::Format { line: 7, .. })));
    }

    #[test]
    fn pattern_file_round_trip() {
        let text = "PSPH-PATTERNS v1\nminsup_count=3\ndb_size=4\nmode=POSITIONAL\nA%C%B\t4\nAC%B\t3\n";
        let set = read_patterns(text.as_bytes()).unwrap();
        assert_eq!(set.len(), 2);
        let mut out = Vec::new();
        write_patterns(&set, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn pattern_file_validation() {
        let base = "PSPH-PATTERNS v1\nminsup_count=3\ndb_size=4\nmode=REGULAR\n";
        assert!(read_patterns(format!("{base}A%B\t4\n").as_bytes()).is_ok());
        assert!(read_patterns(format!("{base}AB\t4\n").as_bytes()).is_err());
        assert!(read_patterns(format!("{base}A%B\t2\n").as_bytes()).is_err());
        assert!(read_patterns(format!("{base}A%B\t5\n").as_bytes()).is_err());
        assert!(read_patterns(format!("{base}A%B\t3\nA%B\t3\n").as_bytes()).is_err());
    }
}
