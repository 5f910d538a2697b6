//! Deterministic synthetic text columns.
//!
//! Rows are sequences of space-separated words drawn from a fixed lexicon
//! with Zipf-distributed popularity. Lexicon words are themselves built
//! from a Zipf-skewed alphabet, so popular words and character runs recur
//! across many rows and frequent patterns exist at low support levels.

use std::ops::RangeInclusive;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::database::SequenceDatabase;
use crate::error::{Error, Result};

/// Letters used for alphabets, in order of decreasing frequency.
const LETTERS: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub rows: usize,
    pub alphabet_size: usize,
    /// Row length in characters, spaces included.
    pub length: RangeInclusive<usize>,
    pub lexicon_size: usize,
    pub word_length: RangeInclusive<usize>,
    /// Zipf exponent of letter frequencies inside lexicon words.
    pub letter_skew: f64,
    /// Zipf exponent of word popularity.
    pub word_skew: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(rows: usize, alphabet_size: usize, length: RangeInclusive<usize>, seed: u64) -> Self {
        SynthSpec {
            rows,
            alphabet_size,
            length,
            lexicon_size: 400,
            word_length: 3..=9,
            letter_skew: 1.0,
            word_skew: 1.1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.lexicon_size == 0 {
            return Err(Error::Config("row and lexicon counts must be positive".into()));
        }
        if self.alphabet_size == 0 || self.alphabet_size > LETTERS.len() {
            return Err(Error::Config(format!(
                "alphabet size must be in 1..={}, got {}",
                LETTERS.len(),
                self.alphabet_size
            )));
        }
        if self.length.is_empty() || *self.length.start() == 0 {
            return Err(Error::Config("row length range must be non-empty and positive".into()));
        }
        if !(self.letter_skew >= 0.0 && self.word_skew >= 0.0) {
            return Err(Error::Config("skew exponents must be non-negative".into()));
        }
        if self.word_length.is_empty() || *self.word_length.start() == 0 {
            return Err(Error::Config("word length range must be non-empty and positive".into()));
        }
        Ok(())
    }
}

fn zipf(n: usize, s: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|k| 1.0 / (k as f64).powf(s))).expect("positive weights")
}

pub fn synth(spec: &SynthSpec) -> Result<SequenceDatabase> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let letters: Vec<char> = LETTERS.chars().take(spec.alphabet_size).collect();
    let letter_dist = zipf(letters.len(), spec.letter_skew);
    let lexicon: Vec<String> = (0..spec.lexicon_size)
        .map(|_| {
            let len = rng.gen_range(spec.word_length.clone());
            (0..len).map(|_| letters[letter_dist.sample(&mut rng)]).collect()
        })
        .collect();
    let word_dist = zipf(lexicon.len(), spec.word_skew);

    let (lo, hi) = (*spec.length.start(), *spec.length.end());
    let mut rows = Vec::with_capacity(spec.rows);
    for _ in 0..spec.rows {
        // Skewed towards short rows.
        let u: f64 = rng.gen();
        let target = lo + ((hi - lo) as f64 * u * u).floor() as usize;
        let mut row = String::new();
        while row.chars().count() < target {
            if !row.is_empty() {
                row.push(' ');
            }
            row.push_str(&lexicon[word_dist.sample(&mut rng)]);
        }
        let mut chars: Vec<char> = row.chars().take(target).collect();
        // Never end on a separator; the last letter is replaced instead.
        if chars.last() == Some(&' ') {
            *chars.last_mut().expect("non-empty") = letters[letter_dist.sample(&mut rng)];
        }
        rows.push(chars.into_iter().collect::<String>());
    }
    Ok(SequenceDatabase::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let spec = SynthSpec::new(1000, 6, 18..=60, 7);
        let a = synth(&spec).unwrap();
        assert_eq!(a, synth(&spec).unwrap());
        assert_eq!(a.size(), 1000);
        let allowed: Vec<char> = LETTERS.chars().take(6).chain([' ']).collect();
        for row in a.rows() {
            let n = row.chars().count();
            assert!((18..=60).contains(&n), "{n}");
            assert!(row.chars().all(|c| allowed.contains(&c)));
            assert!(!row.ends_with(' ') && !row.starts_with(' '));
        }
        assert_ne!(a, synth(&SynthSpec::new(1000, 6, 18..=60, 8)).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(synth(&SynthSpec::new(0, 6, 18..=60, 1)).is_err());
        assert!(synth(&SynthSpec::new(10, 0, 18..=60, 1)).is_err());
        assert!(synth(&SynthSpec::new(10, 99, 18..=60, 1)).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 60..=18;
        assert!(synth(&SynthSpec::new(10, 6, empty, 1)).is_err());
    }
}
