//! Segmented and raw corpora.
//!
//! A sentence is a sequence of syllables. Between each pair of adjacent
//! syllables sits a gap, and a segmentation assigns every gap a [`Label`]:
//! `Underscore` when both syllables belong to the same word, `Space` when
//! the gap is a word boundary. A sentence of `n` syllables has `n - 1` gaps.
//!
//! On disk a segmented line joins the syllables of a word with `_` and
//! separates words with spaces (`hiện_đại_hoá đất_nước`). A raw line is the
//! same text without underscores.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// The gap is word-internal.
    Underscore,
    /// The gap separates two words.
    Space,
}

impl Label {
    pub fn separator(self) -> char {
        match self {
            Label::Underscore => '_',
            Label::Space => ' ',
        }
    }

    /// `+1` for `Underscore`, `-1` for `Space`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Underscore => 1.0,
            Label::Space => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyllableType {
    Lower,
    Upper,
    AllUpper,
    Other,
}

impl SyllableType {
    pub fn as_str(self) -> &'static str {
        match self {
            SyllableType::Lower => "LOWER",
            SyllableType::Upper => "UPPER",
            SyllableType::AllUpper => "ALL_UPPER",
            SyllableType::Other => "OTHER",
        }
    }
}

impl fmt::Display for SyllableType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

static TONE_MAP_SOURCE: &str = include_str!("../resources/tone_map.tsv");

fn tone_map() -> &'static [(String, String)] {
    static MAP: OnceLock<Vec<(String, String)>> = OnceLock::new();
    MAP.get_or_init(|| {
        TONE_MAP_SOURCE
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let (old, new) = l.split_once('\t')?;
                Some((old.nfc().collect(), new.nfc().collect()))
            })
            .collect()
    })
}

/// Lowercase-simplified form of a syllable: NFC, lowercase, and old-style
/// tone placement on the open rhymes `oa`, `oe`, `uy` moved to the main vowel.
pub fn normalize_syllable(s: &str) -> String {
    let lowered: String = s.nfc().collect::<String>().to_lowercase().nfc().collect();
    for (old, new) in tone_map() {
        if let Some(stem) = lowered.strip_suffix(old.as_str()) {
            let mut out = String::with_capacity(lowered.len());
            out.push_str(stem);
            out.push_str(new);
            return out;
        }
    }
    lowered
}

pub fn classify_syllable_type(s: &str) -> SyllableType {
    let chars: Vec<char> = s.nfc().collect();
    let Some((&first, rest)) = chars.split_first() else {
        return SyllableType::Other;
    };
    let lower = |c: &char| c.is_alphabetic() && c.is_lowercase();
    let upper = |c: &char| c.is_alphabetic() && c.is_uppercase();

    if chars.iter().all(lower) {
        SyllableType::Lower
    } else if chars.len() >= 2 && chars.iter().all(upper) {
        SyllableType::AllUpper
    } else if upper(&first) && rest.iter().all(lower) {
        SyllableType::Upper
    } else {
        SyllableType::Other
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sentence {
    raw: Vec<String>,
    norm: Vec<String>,
    types: Vec<SyllableType>,
    labels: Option<Vec<Label>>,
}

impl Sentence {
    /// Builds an unlabeled sentence from surface syllables.
    pub fn from_syllables<S: AsRef<str>>(syllables: &[S]) -> Result<Self> {
        if syllables.is_empty() {
            return Err(Error::EmptySentence);
        }
        let mut raw = Vec::with_capacity(syllables.len());
        for s in syllables {
            let s: String = s.as_ref().nfc().collect();
            if s.is_empty() || s.contains('_') || s.chars().any(char::is_whitespace) {
                return Err(Error::MalformedToken { token: s });
            }
            raw.push(s);
        }
        let norm = raw.iter().map(|s| normalize_syllable(s)).collect();
        let types = raw.iter().map(|s| classify_syllable_type(s)).collect();
        Ok(Sentence {
            raw,
            norm,
            types,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        self.set_labels(labels)?;
        Ok(self)
    }

    pub fn set_labels(&mut self, labels: Vec<Label>) -> Result<()> {
        if labels.len() != self.gaps() {
            return Err(Error::LabelArity {
                expected: self.gaps(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn clear_labels(&mut self) {
        self.labels = None;
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Number of inter-syllable gaps, `len() - 1`.
    pub fn gaps(&self) -> usize {
        self.raw.len() - 1
    }

    pub fn raw(&self) -> &[String] {
        &self.raw
    }

    pub fn norm(&self) -> &[String] {
        &self.norm
    }

    pub fn types(&self) -> &[SyllableType] {
        &self.types
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    /// Inclusive `(start, end)` syllable spans of the words, or `None` when
    /// the sentence carries no labels.
    pub fn word_spans(&self) -> Option<Vec<(usize, usize)>> {
        self.labels.as_deref().map(|l| spans_of(l, self.len()))
    }
}

/// Word spans for `labels` over `n` syllables; `labels.len()` must be `n - 1`.
pub(crate) fn spans_of(labels: &[Label], n: usize) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    for (gap, label) in labels.iter().enumerate() {
        if *label == Label::Space {
            spans.push((start, gap));
            start = gap + 1;
        }
    }
    if n > 0 {
        spans.push((start, n - 1));
    }
    spans
}

/// Parses one underscore-segmented line into a labeled sentence.
pub fn parse_underscore_sentence(line: &str) -> Result<Sentence> {
    let line: String = line.nfc().collect();
    let mut syllables = Vec::new();
    let mut labels = Vec::new();
    for token in line.split_whitespace() {
        if !syllables.is_empty() {
            labels.push(Label::Space);
        }
        let parts: Vec<&str> = token.split('_').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::MalformedToken {
                token: token.to_string(),
            });
        }
        for (k, part) in parts.iter().enumerate() {
            if k > 0 {
                labels.push(Label::Underscore);
            }
            syllables.push(*part);
        }
    }
    if syllables.is_empty() {
        return Err(Error::EmptySentence);
    }
    Sentence::from_syllables(&syllables)?.with_labels(labels)
}

/// Parses one raw (unsegmented) line. Underscores are rejected.
pub fn parse_raw_sentence(line: &str) -> Result<Sentence> {
    let line: String = line.nfc().collect();
    let syllables: Vec<&str> = line.split_whitespace().collect();
    if let Some(bad) = syllables.iter().find(|s| s.contains('_')) {
        return Err(Error::MalformedToken {
            token: bad.to_string(),
        });
    }
    Sentence::from_syllables(&syllables)
}

/// Renders `sentence` using its own labels.
pub fn render_segmentation(sentence: &Sentence) -> Result<String> {
    match sentence.labels() {
        Some(labels) => render_with_labels(sentence, labels),
        None => Err(Error::LabelArity {
            expected: sentence.gaps(),
            got: 0,
        }),
    }
}

pub fn render_with_labels(sentence: &Sentence, labels: &[Label]) -> Result<String> {
    if labels.len() != sentence.gaps() {
        return Err(Error::LabelArity {
            expected: sentence.gaps(),
            got: labels.len(),
        });
    }
    let mut out = String::new();
    for (k, syl) in sentence.raw().iter().enumerate() {
        if k > 0 {
            out.push(labels[k - 1].separator());
        }
        out.push_str(syl);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    source: String,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, source: impl Into<String>) -> Result<Self> {
        if let Some(first) = sentences.first() {
            let labeled = first.is_labeled();
            if sentences.iter().any(|s| s.is_labeled() != labeled) {
                return Err(Error::MixedCorpus);
            }
        }
        Ok(Corpus {
            sentences,
            source: source.into(),
        })
    }

    /// Parses segmented lines. Blank lines are skipped.
    pub fn from_segmented_lines<'a, I>(lines: I, source: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let sentences = lines
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .map(parse_underscore_sentence)
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(sentences, source)
    }

    pub fn from_raw_lines<'a, I>(lines: I, source: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let sentences = lines
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .map(parse_raw_sentence)
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(sentences, source)
    }

    pub fn read_segmented(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
        Corpus::from_segmented_lines(text.lines(), path.display().to_string())
    }

    pub fn read_raw(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
        Corpus::from_raw_lines(text.lines(), path.display().to_string())
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// True when every sentence carries labels. An empty corpus counts as labeled.
    pub fn is_labeled(&self) -> bool {
        self.sentences.iter().all(Sentence::is_labeled)
    }

    pub(crate) fn require_labels(&self) -> Result<()> {
        if self.is_labeled() {
            Ok(())
        } else {
            Err(Error::NeedsLabels)
        }
    }

    pub fn to_segmented_text(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&render_segmentation(s)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Fold {
    pub train: Corpus,
    pub test: Corpus,
}

/// Sentence-level k-fold partition. Sentences are shuffled with `seed`, then
/// the first `n % k` folds receive one extra test sentence. Both halves keep
/// the original corpus order.
pub fn split_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let n = corpus.len();
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::NotEnoughData(format!(
            "{k} folds requested for {n} sentences"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut fold_of = vec![0usize; n];
    let (base, extra) = (n / k, n % k);
    let mut cursor = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &idx in &order[cursor..cursor + size] {
            fold_of[idx] = fold;
        }
        cursor += size;
    }

    let source = corpus.source();
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (idx, sentence) in corpus.sentences().iter().enumerate() {
            if fold_of[idx] == fold {
                test.push(sentence.clone());
            } else {
                train.push(sentence.clone());
            }
        }
        folds.push(Fold {
            train: Corpus::new(train, format!("{source}#fold{fold}/train"))?,
            test: Corpus::new(test, format!("{source}#fold{fold}/test"))?,
        });
    }
    Ok(folds)
}

/// Occurrence counts of each label over a corpus.
pub fn label_counts(corpus: &Corpus) -> HashMap<Label, usize> {
    let mut counts = HashMap::new();
    for l in corpus
        .sentences()
        .iter()
        .filter_map(Sentence::labels)
        .flatten()
    {
        *counts.entry(*l).or_default() += 1;
    }
    counts
}
