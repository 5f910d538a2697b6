//! Depth-first pattern growth over an integer-encoded copy of the database.

use crate::database::SequenceDatabase;
use crate::pattern::{is_pattern_char, PositionalPattern};

use super::{closure_extend, MinedPattern, MinerConfig, Mode, Report};

type Sym = u32;

/// Characters that cannot appear in patterns are encoded as `SEP`: they
/// occupy a position but never match or get counted.
const SEP: Sym = Sym::MAX;

pub(super) struct Encoded {
    symbols: Vec<char>,
    rows: Vec<Vec<Sym>>,
}

impl Encoded {
    pub(super) fn new(db: &SequenceDatabase) -> Self {
        let mut symbols: Vec<char> = db
            .rows()
            .iter()
            .flat_map(|r| r.chars())
            .filter(|&c| is_pattern_char(c))
            .collect();
        symbols.sort_unstable();
        symbols.dedup();
        let rows = db
            .rows()
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| match symbols.binary_search(&c) {
                        Ok(i) if is_pattern_char(c) => i as Sym,
                        _ => SEP,
                    })
                    .collect()
            })
            .collect();
        Encoded { symbols, rows }
    }

    fn alphabet_len(&self) -> usize {
        self.symbols.len()
    }

    fn encode(&self, pattern: &PositionalPattern) -> Option<Vec<Vec<Sym>>> {
        pattern
            .runs()
            .map(|run| {
                run.chars()
                    .map(|c| self.symbols.binary_search(&c).ok().map(|i| i as Sym))
                    .collect()
            })
            .collect()
    }

    fn decode(&self, runs: &[Vec<Sym>]) -> PositionalPattern {
        let runs = runs
            .iter()
            .map(|r| r.iter().map(|&s| self.symbols[s as usize]).collect::<String>());
        PositionalPattern::from_runs(runs).expect("encoded runs are valid")
    }
}

fn find_from(row: &[Sym], run: &[Sym], from: usize) -> Option<usize> {
    if run.len() > row.len() {
        return None;
    }
    (from..=row.len() - run.len()).find(|&j| row[j..j + run.len()] == *run)
}

/// Latest start `j` with `j + run.len() <= limit`.
fn rfind_before(row: &[Sym], run: &[Sym], limit: usize) -> Option<usize> {
    if run.len() > limit {
        return None;
    }
    (0..=limit - run.len()).rev().find(|&j| row[j..j + run.len()] == *run)
}

/// `ends[i]` is where the greedy (earliest-ending) embedding of the first
/// `i` runs ends; `ends[0] = 0`.
fn earliest_ends(row: &[Sym], runs: &[Vec<Sym>]) -> Option<Vec<usize>> {
    let mut ends = Vec::with_capacity(runs.len() + 1);
    ends.push(0);
    let mut at = 0;
    for run in runs {
        at = find_from(row, run, at)? + run.len();
        ends.push(at);
    }
    Some(ends)
}

/// `starts[i]` is the latest start of run `i` such that runs `i..` still fit
/// before `limit`; `starts[runs.len()] = limit`. Caller guarantees a fit.
fn latest_starts(row: &[Sym], runs: &[Vec<Sym>], limit: usize) -> Vec<usize> {
    let mut starts = vec![0; runs.len() + 1];
    starts[runs.len()] = limit;
    for i in (0..runs.len()).rev() {
        starts[i] = rfind_before(row, &runs[i], starts[i + 1]).expect("pattern embeds in row");
    }
    starts
}

/// Running intersection of candidate insertion items over the supporting
/// rows, one bitset per insertion slot, plus one flag per run merge.
struct SlotIntersection {
    words: usize,
    sets: Vec<u64>,
    merges: Vec<bool>,
    row_sets: Vec<u64>,
    row_merges: Vec<bool>,
    started: bool,
}

impl SlotIntersection {
    fn new(alphabet: usize, slots: usize, merges: usize) -> Self {
        let words = alphabet.div_ceil(64).max(1);
        SlotIntersection {
            words,
            sets: vec![0; words * slots],
            merges: vec![false; merges],
            row_sets: vec![0; words * slots],
            row_merges: vec![false; merges],
            started: false,
        }
    }

    fn clear_row(&mut self) {
        self.row_sets.iter_mut().for_each(|w| *w = 0);
        self.row_merges.iter_mut().for_each(|m| *m = false);
    }

    fn mark(&mut self, slot: usize, sym: Sym) {
        if sym != SEP {
            let s = sym as usize;
            self.row_sets[slot * self.words + s / 64] |= 1 << (s % 64);
        }
    }

    /// Folds the current row in; returns whether any candidate survives.
    fn fold_row(&mut self) -> bool {
        if self.started {
            for (acc, w) in self.sets.iter_mut().zip(&self.row_sets) {
                *acc &= *w;
            }
            for (acc, m) in self.merges.iter_mut().zip(&self.row_merges) {
                *acc &= *m;
            }
        } else {
            self.sets.copy_from_slice(&self.row_sets);
            self.merges.copy_from_slice(&self.row_merges);
            self.started = true;
        }
        self.any()
    }

    fn any(&self) -> bool {
        self.sets.iter().any(|&w| w != 0) || self.merges.iter().any(|&m| m)
    }
}

/// True when some one-step specialization of `runs` is contained in every
/// row listed in `rows`. Forward extensions (after the last character) are
/// only examined when `include_forward` is set; the miner already knows
/// them from its local item counts.
fn has_equal_specialization(
    enc: &Encoded,
    runs: &[Vec<Sym>],
    rows: impl Iterator<Item = usize>,
    mode: Mode,
    include_forward: bool,
) -> bool {
    let k = runs.len();
    let positional = mode == Mode::Positional;
    // Gap slots 0..k (slot k is forward), then two adjacency slots per run,
    // one for each end; the last run's trailing end is forward as well.
    let gap_slots = k + 1;
    let adj_base: Vec<usize> = (0..k).map(|i| gap_slots + 2 * i).collect();
    let slots = if positional { gap_slots + 2 * k } else { gap_slots };
    let merges = if positional { k - 1 } else { 0 };
    let mut acc = SlotIntersection::new(enc.alphabet_len(), slots, merges);

    for r in rows {
        let row = &enc.rows[r];
        let first = earliest_ends(row, runs).expect("row supports pattern");
        let last = latest_starts(row, runs, row.len());
        acc.clear_row();

        let gap_upto = if include_forward { k + 1 } else { k };
        for i in 0..gap_upto {
            let hi = if i == k { row.len() } else { last[i] };
            for &c in &row[first[i]..hi] {
                acc.mark(i, c);
            }
        }

        if positional {
            for (i, run) in runs.iter().enumerate() {
                let len = run.len();
                let lo = first[i];
                let hi = last[i + 1]; // occurrence of the widened run must end by here
                // Only the run's two ends: a character inside the run would
                // break its contiguity, which is no specialization.
                let trailing = i + 1 < k || include_forward;
                for o in [0, len] {
                    if o == len && !trailing {
                        continue;
                    }
                    let slot = adj_base[i] + usize::from(o == len);
                    if hi < lo + len + 1 {
                        continue;
                    }
                    for j in lo..=hi - len - 1 {
                        if row[j..j + o] == run[..o] && row[j + o + 1..j + len + 1] == run[o..] {
                            acc.mark(slot, row[j + o]);
                        }
                    }
                }
            }
            for i in 1..k {
                let lo = first[i - 1];
                let hi = last[i + 1];
                let joined: Vec<Sym> = runs[i - 1].iter().chain(&runs[i]).copied().collect();
                acc.row_merges[i - 1] = find_from(row, &joined, lo).is_some_and(|j| j + joined.len() <= hi);
            }
        }

        if !acc.fold_row() {
            return false;
        }
    }
    acc.any()
}

/// BackScan: some item sits, in every supporting row, between the earliest
/// embedding of runs `..i` and the latest placement of runs `i..` inside
/// the first instance. Every gap descendant then has an equal-support
/// specialization, and so does the pattern itself.
fn backscan_fires(enc: &Encoded, runs: &[Vec<Sym>], rows: impl Iterator<Item = usize>) -> bool {
    let k = runs.len();
    let mut acc = SlotIntersection::new(enc.alphabet_len(), k, 0);
    for r in rows {
        let row = &enc.rows[r];
        let first = earliest_ends(row, runs).expect("row supports pattern");
        let last = latest_starts(row, runs, first[k]);
        acc.clear_row();
        for i in 0..k {
            for &c in &row[first[i]..last[i]] {
                acc.mark(i, c);
            }
        }
        if !acc.fold_row() {
            return false;
        }
    }
    acc.any()
}

/// Rows supporting the current prefix, with the end positions of every
/// admissible occurrence of the last run (ascending). The first entry is
/// the end of the prefix's first instance.
struct Proj {
    row: u32,
    ends: Vec<u32>,
}

pub(super) struct Search<'a> {
    enc: &'a Encoded,
    minsup: u64,
    mode: Mode,
    backscan: bool,
    cap: Option<usize>,
    report: Report,
    stamp: Vec<u32>,
    epoch: u32,
    out: Vec<MinedPattern>,
}

impl<'a> Search<'a> {
    pub(super) fn run(db: &SequenceDatabase, cfg: &MinerConfig, minsup: u64) -> Vec<MinedPattern> {
        let enc = Encoded::new(db);
        let mut search = Search {
            enc: &enc,
            minsup,
            mode: cfg.mode,
            backscan: cfg.backscan,
            cap: cfg.max_pattern_literals,
            report: cfg.report,
            stamp: vec![0; enc.alphabet_len()],
            epoch: 0,
            out: Vec::new(),
        };
        if search.cap == Some(0) {
            return Vec::new();
        }
        for sym in 0..enc.alphabet_len() as Sym {
            let projs: Vec<Proj> = enc
                .rows
                .iter()
                .enumerate()
                .filter_map(|(r, row)| {
                    let ends: Vec<u32> = row
                        .iter()
                        .enumerate()
                        .filter(|&(_, &s)| s == sym)
                        .map(|(p, _)| p as u32 + 1)
                        .collect();
                    (!ends.is_empty()).then_some(Proj { row: r as u32, ends })
                })
                .collect();
            if projs.len() as u64 >= minsup {
                let mut runs = vec![vec![sym]];
                search.visit(&mut runs, &projs, 1, false);
            }
        }
        search.out
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Row counts of gap items (anywhere after the first instance) and
    /// adjacent items (directly after some admissible occurrence).
    fn count(&mut self, projs: &[Proj]) -> (Vec<u64>, Vec<u64>) {
        let n = self.enc.alphabet_len();
        let mut gap = vec![0u64; n];
        let mut adj = vec![0u64; n];
        for p in projs {
            let row = &self.enc.rows[p.row as usize];
            let e = self.next_epoch();
            for &s in &row[p.ends[0] as usize..] {
                if s != SEP && self.stamp[s as usize] != e {
                    self.stamp[s as usize] = e;
                    gap[s as usize] += 1;
                }
            }
            if self.mode == Mode::Positional {
                let e = self.next_epoch();
                for &end in &p.ends {
                    if let Some(&s) = row.get(end as usize) {
                        if s != SEP && self.stamp[s as usize] != e {
                            self.stamp[s as usize] = e;
                            adj[s as usize] += 1;
                        }
                    }
                }
            }
        }
        (gap, adj)
    }

    fn visit(&mut self, runs: &mut Vec<Vec<Sym>>, projs: &[Proj], literals: usize, known_non_closed: bool) {
        let support = projs.len() as u64;
        let rows = || projs.iter().map(|p| p.row as usize);
        let pruned = self.backscan && backscan_fires(self.enc, runs, rows());
        if pruned && self.report == Report::Visited {
            return;
        }
        let (gap, adj) = self.count(projs);

        let emit = match self.report {
            Report::Visited => true,
            Report::Closed => {
                !pruned
                    && !known_non_closed
                    && !gap.iter().chain(&adj).any(|&c| c == support)
                    && !has_equal_specialization(self.enc, runs, rows(), self.mode, false)
            }
        };
        if emit {
            self.out.push(MinedPattern::new(self.enc.decode(runs), support));
        }
        if self.cap.is_some_and(|cap| literals >= cap) {
            return;
        }

        for sym in 0..self.enc.alphabet_len() {
            let (g, a) = (gap[sym], adj[sym]);
            let (grow_gap, grow_adj) = match self.report {
                Report::Closed => (g >= self.minsup && !pruned, a >= self.minsup),
                Report::Visited => {
                    let choice = closure_extend(Some(g), Some(a), self.minsup);
                    (choice.gap, choice.adjacent)
                }
            };
            let sym = sym as Sym;
            if grow_adj {
                let child = self.adjacent_child(projs, sym);
                runs.last_mut().expect("non-empty").push(sym);
                self.visit(runs, &child, literals + 1, false);
                runs.last_mut().expect("non-empty").pop();
            }
            if grow_gap {
                let child = self.gap_child(projs, sym);
                runs.push(vec![sym]);
                self.visit(runs, &child, literals + 1, a == g);
                runs.pop();
            }
        }
    }

    fn gap_child(&self, projs: &[Proj], sym: Sym) -> Vec<Proj> {
        projs
            .iter()
            .filter_map(|p| {
                let row = &self.enc.rows[p.row as usize];
                let base = p.ends[0] as usize;
                let ends: Vec<u32> = (base..row.len())
                    .filter(|&i| row[i] == sym)
                    .map(|i| i as u32 + 1)
                    .collect();
                (!ends.is_empty()).then_some(Proj { row: p.row, ends })
            })
            .collect()
    }

    fn adjacent_child(&self, projs: &[Proj], sym: Sym) -> Vec<Proj> {
        projs
            .iter()
            .filter_map(|p| {
                let row = &self.enc.rows[p.row as usize];
                let ends: Vec<u32> = p
                    .ends
                    .iter()
                    .filter(|&&e| row.get(e as usize) == Some(&sym))
                    .map(|&e| e + 1)
                    .collect();
                (!ends.is_empty()).then_some(Proj { row: p.row, ends })
            })
            .collect()
    }
}

pub(super) fn is_closed_in(db: &SequenceDatabase, pattern: &PositionalPattern, mode: Mode) -> bool {
    let enc = Encoded::new(db);
    let Some(runs) = enc.encode(pattern) else {
        return true; // unsupported, so vacuously nothing more specific ties
    };
    let rows: Vec<usize> = (0..enc.rows.len())
        .filter(|&r| earliest_ends(&enc.rows[r], &runs).is_some())
        .collect();
    if rows.is_empty() {
        return true;
    }
    !has_equal_specialization(&enc, &runs, rows.into_iter(), mode, true)
}
