//! Pattern algebra shared by every stage: LIKE predicates, positional
//! patterns, and the containment relations between patterns and rows.
//!
//! A [`PositionalPattern`] is a list of literal runs separated by gaps and is
//! stored as its LIKE rendering (`AC%CB`). Patterns always float inside a
//! row: `AC%CB` means `%AC%CB%`. Literal characters are Unicode scalar values
//! compared exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Zero-or-more wildcard, also the gap marker between literal runs.
pub const ANY_RUN: char = '%';
/// Exactly-one wildcard.
pub const ANY_ONE: char = '_';

/// Characters that can never be part of a pattern literal: the two
/// wildcards, plus the field and line separators of the on-disk formats.
pub fn is_pattern_char(c: char) -> bool {
    !matches!(c, ANY_RUN | ANY_ONE | '\t' | '\n' | '\r')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Literal(char),
    AnyRun,
    AnyOne,
}

impl Token {
    fn from_char(c: char) -> Token {
        match c {
            ANY_RUN => Token::AnyRun,
            ANY_ONE => Token::AnyOne,
            c => Token::Literal(c),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Token::Literal(c) => c,
            Token::AnyRun => ANY_RUN,
            Token::AnyOne => ANY_ONE,
        }
    }

    pub fn is_literal(self) -> bool {
        matches!(self, Token::Literal(_))
    }
}

pub fn render_tokens(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.as_char()).collect()
}

/// A parsed SQL LIKE predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LikePredicate {
    raw: String,
    tokens: Vec<Token>,
}

impl LikePredicate {
    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::InvalidPredicate("empty predicate".into()));
        }
        Ok(LikePredicate {
            raw: text.to_string(),
            tokens: text.chars().map(Token::from_char).collect(),
        })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn anchored_prefix(&self) -> bool {
        self.tokens.first() != Some(&Token::AnyRun)
    }

    pub fn anchored_suffix(&self) -> bool {
        self.tokens.last() != Some(&Token::AnyRun)
    }

    pub fn literal_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_literal()).count()
    }

    /// The positional pattern the estimator works with: `_` relaxes to a gap,
    /// consecutive gaps collapse, and edge gaps are dropped.
    pub fn canonicalize(&self) -> Result<PositionalPattern> {
        canonicalize_tokens(&self.tokens)
    }

    /// Full LIKE semantics, anchors and `_` included.
    pub fn matches(&self, row: &str) -> bool {
        let row: Vec<char> = row.chars().collect();
        like_match_tokens(&self.tokens, &row)
    }
}

impl fmt::Display for LikePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl FromStr for LikePredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LikePredicate::parse(s)
    }
}

pub fn parse_like(text: &str) -> Result<LikePredicate> {
    LikePredicate::parse(text)
}

pub fn canonicalize(p: &LikePredicate) -> Result<PositionalPattern> {
    p.canonicalize()
}

pub fn like_matches(p: &LikePredicate, row: &str) -> bool {
    p.matches(row)
}

/// Canonical form of an arbitrary token slice. Used for whole predicates
/// and for the pieces the estimator cuts them into.
pub fn canonicalize_tokens(tokens: &[Token]) -> Result<PositionalPattern> {
    let mut runs: Vec<String> = Vec::new();
    let mut current = String::new();
    for &t in tokens {
        match t {
            Token::Literal(c) => current.push(c),
            Token::AnyRun | Token::AnyOne => {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    if runs.is_empty() {
        return Err(Error::DegeneratePattern);
    }
    PositionalPattern::from_runs(runs)
}

fn like_match_tokens(tokens: &[Token], row: &[char]) -> bool {
    let (mut t, mut r) = (0usize, 0usize);
    // Last `%` seen and the row position it is currently absorbing up to.
    let mut backtrack: Option<(usize, usize)> = None;
    while r < row.len() {
        if t < tokens.len() {
            match tokens[t] {
                Token::AnyRun => {
                    backtrack = Some((t, r));
                    t += 1;
                    continue;
                }
                Token::AnyOne => {
                    t += 1;
                    r += 1;
                    continue;
                }
                Token::Literal(c) if c == row[r] => {
                    t += 1;
                    r += 1;
                    continue;
                }
                Token::Literal(_) => {}
            }
        }
        match backtrack {
            Some((bt, br)) => {
                t = bt + 1;
                r = br + 1;
                backtrack = Some((bt, br + 1));
            }
            None => return false,
        }
    }
    tokens[t..].iter().all(|&x| x == Token::AnyRun)
}

/// Ordered literal runs separated by gaps, stored as the canonical LIKE
/// rendering. Ordering is plain code-point order of that rendering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionalPattern(String);

impl PositionalPattern {
    pub fn from_runs<I, S>(runs: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut rendered = String::new();
        for (i, run) in runs.into_iter().enumerate() {
            let run = run.as_ref();
            if run.is_empty() {
                return Err(invalid(&rendered, "empty literal run"));
            }
            if let Some(c) = run.chars().find(|&c| !is_pattern_char(c)) {
                return Err(invalid(run, &format!("character {c:?} cannot appear in a literal run")));
            }
            if i > 0 {
                rendered.push(ANY_RUN);
            }
            rendered.push_str(run);
        }
        if rendered.is_empty() {
            return Err(Error::DegeneratePattern);
        }
        Ok(PositionalPattern(rendered))
    }

    /// A pattern with a gap between every pair of characters.
    pub fn regular(chars: &str) -> Result<Self> {
        Self::from_runs(chars.chars().map(|c| c.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn runs(&self) -> std::str::Split<'_, char> {
        self.0.split(ANY_RUN)
    }

    pub fn run_count(&self) -> usize {
        self.runs().count()
    }

    pub fn literal_count(&self) -> usize {
        self.0.chars().filter(|&c| c != ANY_RUN).count()
    }

    pub fn is_regular(&self) -> bool {
        self.runs().all(|r| r.chars().count() == 1)
    }

    pub fn striped(&self) -> StripedSequence {
        StripedSequence(self.0.chars().filter(|&c| c != ANY_RUN).collect())
    }

    /// Positional containment in a row, with implicit `%...%` wrapping.
    pub fn matches(&self, row: &str) -> bool {
        let mut rest = row;
        for run in self.runs() {
            match rest.find(run) {
                Some(i) => rest = &rest[i + run.len()..],
                None => return false,
            }
        }
        true
    }

    /// Striped containment: `other`'s literals form a subsequence of ours.
    pub fn contains_pattern(&self, other: &PositionalPattern) -> bool {
        self.striped().properly_contains(&other.striped())
    }

    /// True when every row matching `specific` also matches `self`. Each run
    /// of `self` must sit inside one run of `specific`; placements are
    /// ordered and do not overlap.
    pub fn subsumes(&self, specific: &PositionalPattern) -> bool {
        let targets: Vec<&str> = specific.runs().collect();
        let mut run_idx = 0;
        let mut offset = 0;
        'runs: for run in self.runs() {
            while run_idx < targets.len() {
                if let Some(pos) = targets[run_idx][offset..].find(run) {
                    offset += pos + run.len();
                    continue 'runs;
                }
                run_idx += 1;
                offset = 0;
            }
            return false;
        }
        true
    }

    /// The `%`-wrapped predicate whose LIKE semantics equal positional
    /// matching of this pattern.
    pub fn to_predicate(&self) -> LikePredicate {
        LikePredicate::parse(&format!("%{}%", self.0)).expect("non-empty")
    }
}

fn invalid(pattern: &str, reason: &str) -> Error {
    Error::InvalidPattern {
        pattern: pattern.to_string(),
        reason: reason.to_string(),
    }
}

impl fmt::Display for PositionalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PositionalPattern {
    type Err = Error;

    /// Accepts only the canonical rendering: no `_`, no edge or doubled `%`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(invalid(s, "empty pattern"));
        }
        if s.starts_with(ANY_RUN) || s.ends_with(ANY_RUN) {
            return Err(invalid(s, "leading or trailing gap"));
        }
        Self::from_runs(s.split(ANY_RUN)).map_err(|e| match e {
            Error::InvalidPattern { reason, .. } => invalid(s, &reason),
            other => other,
        })
    }
}

pub fn striped(p: &PositionalPattern) -> StripedSequence {
    p.striped()
}

pub fn row_matches(p: &PositionalPattern, row: &str) -> bool {
    p.matches(row)
}

pub fn pattern_contains(p: &PositionalPattern, r: &PositionalPattern) -> bool {
    p.contains_pattern(r)
}

pub fn pattern_subsumes(general: &PositionalPattern, specific: &PositionalPattern) -> bool {
    general.subsumes(specific)
}

/// The literal characters of a pattern with every wildcard removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StripedSequence(Vec<char>);

impl StripedSequence {
    pub fn chars(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Subsequence test: `s` embeds into `self` in order.
    pub fn properly_contains(&self, s: &StripedSequence) -> bool {
        let mut it = self.0.iter();
        s.0.iter().all(|c| it.any(|x| x == c))
    }
}

impl From<&str> for StripedSequence {
    fn from(s: &str) -> Self {
        StripedSequence(s.chars().collect())
    }
}

impl fmt::Display for StripedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

pub fn properly_contains(q: &StripedSequence, s: &StripedSequence) -> bool {
    q.properly_contains(s)
}
