//! Corpus-derived syllable statistics: separable syllables, suffixes and the
//! unique-word length distribution.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::corpus::{Corpus, Sentence, SyllableType};
use crate::error::Result;
use crate::resources::Lexicon;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivedStats {
    pub separable: BTreeSet<String>,
    pub suffixes: BTreeSet<String>,
    /// `syllable -> (standalone count, word-initial count)`.
    pub sep_counts: BTreeMap<String, (u64, u64)>,
    pub suffix_counts: BTreeMap<String, u64>,
}

impl DerivedStats {
    pub fn compute(corpus: &Corpus, lexicon: &Lexicon) -> Result<Self> {
        let (separable, sep_counts) = compute_separable(corpus)?;
        let (suffixes, suffix_counts) = compute_suffixes(corpus, lexicon)?;
        Ok(DerivedStats {
            separable,
            suffixes,
            sep_counts,
            suffix_counts,
        })
    }

    pub fn is_separable(&self, f: &str) -> bool {
        self.separable.contains(f)
    }

    pub fn is_suffix(&self, f: &str) -> bool {
        self.suffixes.contains(f)
    }
}

/// Calls `visit` with the normalized syllables and the raw types of every
/// word token.
fn for_each_word(sentence: &Sentence, mut visit: impl FnMut(&[String], &[SyllableType])) {
    if let Some(spans) = sentence.word_spans() {
        for (start, end) in spans {
            visit(
                &sentence.norm()[start..=end],
                &sentence.types()[start..=end],
            );
        }
    }
}

/// Per syllable: (standalone count, word-initial count).
pub type SepCounts = BTreeMap<String, (u64, u64)>;

/// A syllable `s` is separable when it occurs more often as a one-syllable
/// word (`a`) than as the first syllable of a longer word (`b`), and its
/// total `a + b` is strictly above the mean total over all syllables with
/// `a > b`.
pub fn compute_separable(corpus: &Corpus) -> Result<(BTreeSet<String>, SepCounts)> {
    corpus.require_labels()?;
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for sentence in corpus.sentences() {
        for_each_word(sentence, |word, _| {
            let entry = counts.entry(word[0].clone()).or_default();
            if word.len() == 1 {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        });
    }

    let candidates: Vec<(&String, u64)> = counts
        .iter()
        .filter(|(_, (a, b))| a > b)
        .map(|(s, (a, b))| (s, a + b))
        .collect();
    let n = candidates.len() as u64;
    let sum: u64 = candidates.iter().map(|(_, total)| total).sum();
    // total > sum / n, kept in integers
    let separable = candidates
        .into_iter()
        .filter(|(_, total)| total * n > sum)
        .map(|(s, _)| s.clone())
        .collect();
    Ok((separable, counts))
}

/// Counts the last syllable of every out-of-lexicon three- or four-syllable
/// word token whose last syllable is lowercase; suffixes are the syllables
/// counted strictly more often than the mean.
pub fn compute_suffixes(
    corpus: &Corpus,
    lexicon: &Lexicon,
) -> Result<(BTreeSet<String>, BTreeMap<String, u64>)> {
    corpus.require_labels()?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for sentence in corpus.sentences() {
        for_each_word(sentence, |word, types| {
            let last = word.len() - 1;
            if (word.len() == 3 || word.len() == 4)
                && types[last] == SyllableType::Lower
                && !lexicon.contains(word)
            {
                *counts.entry(word[last].clone()).or_default() += 1;
            }
        });
    }
    let n = counts.len() as u64;
    let sum: u64 = counts.values().sum();
    let suffixes = counts
        .iter()
        .filter(|(_, &c)| c * n > sum)
        .map(|(s, _)| s.clone())
        .collect();
    Ok((suffixes, counts))
}

pub const LENGTH_BUCKETS: [&str; 6] = ["1", "2", "3", "4", "5-9", ">9"];

fn length_bucket(len: usize) -> usize {
    match len {
        1..=4 => len - 1,
        5..=9 => 4,
        _ => 5,
    }
}

/// Unique-word counts per syllable-length bucket (`1, 2, 3, 4, 5-9, >9`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LengthDistribution {
    pub counts: [u64; 6],
}

impl LengthDistribution {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn percentages(&self) -> [f64; 6] {
        let total = self.total();
        let mut out = [0.0; 6];
        if total > 0 {
            for (p, &c) in out.iter_mut().zip(&self.counts) {
                *p = 100.0 * c as f64 / total as f64;
            }
        }
        out
    }
}

pub fn word_length_distribution(corpus: &Corpus) -> Result<LengthDistribution> {
    corpus.require_labels()?;
    let mut unique: HashSet<Vec<String>> = HashSet::new();
    for sentence in corpus.sentences() {
        for_each_word(sentence, |word, _| {
            unique.insert(word.to_vec());
        });
    }
    let mut dist = LengthDistribution::default();
    for word in &unique {
        dist.counts[length_bucket(word.len())] += 1;
    }
    Ok(dist)
}
