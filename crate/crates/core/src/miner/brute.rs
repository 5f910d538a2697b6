//! Exhaustive reference miner. Enumerates every frequent pattern level by
//! level and keeps those with no equally frequent specialization. Meant for
//! small databases and for cross-checking the real miner.

use std::collections::{BTreeMap, HashMap};

use crate::database::SequenceDatabase;
use crate::error::{Error, Result};
use crate::pattern::{is_pattern_char, pattern_subsumes, row_matches, PositionalPattern};

use super::{MinedPattern, MinerConfig, Mode, PatternSet, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceBudget {
    /// Longest pattern (in literals) the enumeration may reach.
    pub max_literals: usize,
    /// Upper bound on frequent patterns held at any one level.
    pub max_patterns: usize,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget {
            max_literals: 12,
            max_patterns: 200_000,
        }
    }
}

pub fn brute_force_mine(db: &SequenceDatabase, cfg: &MinerConfig, budget: &BruteForceBudget) -> Result<PatternSet> {
    if cfg.report != Report::Closed {
        return Err(Error::Config("brute-force miner only reports closed patterns".into()));
    }
    let minsup = cfg.minsup.resolve(db.size())?;
    if db.is_empty() || minsup > db.size() as u64 || cfg.max_pattern_literals == Some(0) {
        return Ok(PatternSet::new(db.size(), minsup, cfg.mode, Vec::new()));
    }
    // Supporting rows of a pattern; a child only needs its parent's rows.
    let support = |p: &str, candidates: &[usize]| -> Vec<usize> {
        let p: PositionalPattern = p.parse().expect("enumerated pattern is canonical");
        candidates
            .iter()
            .copied()
            .filter(|&r| row_matches(&p, &db.rows()[r]))
            .collect()
    };
    let all_rows: Vec<usize> = (0..db.size()).collect();

    let mut alphabet: Vec<char> = db.alphabet().into_keys().filter(|&c| is_pattern_char(c)).collect();
    alphabet.sort_unstable();

    // One level past the reporting cap is needed to judge closedness.
    let depth = cfg.max_pattern_literals.map(|cap| cap + 1);
    let mut levels: Vec<BTreeMap<String, Vec<usize>>> = Vec::new();
    let mut current: BTreeMap<String, Vec<usize>> = alphabet
        .iter()
        .map(|c| c.to_string())
        .map(|p| {
            let rows = support(&p, &all_rows);
            (p, rows)
        })
        .filter(|(_, rows)| rows.len() as u64 >= minsup)
        .collect();

    let mut literals = 1;
    while !current.is_empty() {
        if current.len() > budget.max_patterns {
            return Err(Error::BudgetExceeded(format!(
                "{} frequent patterns with {} literals",
                current.len(),
                literals
            )));
        }
        if depth.is_some_and(|d| literals >= d) {
            levels.push(current);
            break;
        }
        let mut next = BTreeMap::new();
        for (p, rows) in &current {
            for &c in &alphabet {
                let mut children = vec![format!("{p}%{c}")];
                if cfg.mode == Mode::Positional {
                    children.push(format!("{p}{c}"));
                }
                for child in children {
                    let child_rows = support(&child, rows);
                    if child_rows.len() as u64 >= minsup {
                        next.insert(child, child_rows);
                    }
                }
            }
        }
        levels.push(current);
        current = next;
        literals += 1;
        if literals > budget.max_literals && !current.is_empty() {
            return Err(Error::BudgetExceeded(format!(
                "frequent patterns longer than {} literals",
                budget.max_literals
            )));
        }
    }

    // A specialization with equal frequency is supported by exactly the same
    // rows, so closedness only compares patterns sharing a row set.
    let by_rows: Vec<HashMap<&[usize], Vec<PositionalPattern>>> = levels
        .iter()
        .map(|level| {
            let mut m: HashMap<&[usize], Vec<PositionalPattern>> = HashMap::new();
            for (p, rows) in level {
                m.entry(rows.as_slice()).or_default().push(p.parse().expect("enumerated pattern is canonical"));
            }
            m
        })
        .collect();

    let mut out = Vec::new();
    let report_levels = cfg.max_pattern_literals.unwrap_or(usize::MAX);
    for (i, level) in levels.iter().enumerate() {
        if i + 1 > report_levels {
            break;
        }
        for (p, rows) in level {
            let general: PositionalPattern = p.parse().expect("enumerated pattern is canonical");
            // An equal-support specialization with one step more exists
            // whenever any does: one more literal, or two runs merged at the
            // same literal count.
            let closed = by_rows[i..levels.len().min(i + 2)].iter().all(|level| {
                level
                    .get(rows.as_slice())
                    .is_none_or(|same| !same.iter().any(|q| *q != general && pattern_subsumes(&general, q)))
            });
            if closed {
                out.push(MinedPattern::new(general, rows.len() as u64));
            }
        }
    }
    Ok(PatternSet::new(db.size(), minsup, cfg.mode, out))
}
