//! Word-level scoring and the cross-validation experiments built on it.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::corpus::{spans_of, split_folds, Corpus, Label, Sentence};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::model::train_model;
use crate::resources::{Lexicon, NameLists};
use crate::stats::DerivedStats;
use crate::svm::SolverParams;

/// Inclusive syllable span of one word.
pub type Span = (usize, usize);

pub fn spans_from_labels(labels: &[Label], n_syllables: usize) -> Result<Vec<Span>> {
    if n_syllables == 0 || labels.len() + 1 != n_syllables {
        return Err(Error::LabelArity {
            expected: n_syllables.saturating_sub(1),
            got: labels.len(),
        });
    }
    Ok(spans_of(labels, n_syllables))
}

/// Raw word counts; kept separate from the ratios so folds and buckets can be
/// summed exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub gold: u64,
    pub pred: u64,
    pub correct: u64,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.gold += other.gold;
        self.pred += other.pred;
        self.correct += other.correct;
    }

    pub fn metrics(&self) -> Metrics {
        Metrics::from_counts(*self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: Counts,
}

impl Metrics {
    pub fn from_counts(counts: Counts) -> Self {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(counts.correct, counts.pred);
        let recall = ratio(counts.correct, counts.gold);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            precision,
            recall,
            f1,
            counts,
        }
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.4} R={:.4} F1={:.4} (gold={} pred={} correct={})",
            100.0 * self.precision,
            100.0 * self.recall,
            100.0 * self.f1,
            self.counts.gold,
            self.counts.pred,
            self.counts.correct
        )
    }
}

/// Word counts for one sentence against predicted labels.
pub fn count_sentence(gold: &Sentence, pred_labels: &[Label]) -> Result<Counts> {
    let gold_labels = gold.labels().ok_or(Error::NeedsLabels)?;
    let g = spans_from_labels(gold_labels, gold.len())?;
    let p = spans_from_labels(pred_labels, gold.len())?;
    let gold_set: HashSet<Span> = g.iter().copied().collect();
    let correct = p.iter().filter(|s| gold_set.contains(s)).count();
    Ok(Counts {
        gold: g.len() as u64,
        pred: p.len() as u64,
        correct: correct as u64,
    })
}

fn check_aligned(gold: &Corpus, pred: &Corpus) -> Result<()> {
    gold.require_labels()?;
    pred.require_labels()?;
    if gold.len() != pred.len() {
        return Err(Error::Alignment {
            sentence: gold.len().min(pred.len()),
        });
    }
    for (k, (g, p)) in gold.sentences().iter().zip(pred.sentences()).enumerate() {
        if g.raw() != p.raw() {
            return Err(Error::Alignment { sentence: k });
        }
    }
    Ok(())
}

/// Corpus-wide (micro) word precision, recall and F1.
pub fn score(gold: &Corpus, pred: &Corpus) -> Result<Metrics> {
    check_aligned(gold, pred)?;
    let mut total = Counts::default();
    for (g, p) in gold.sentences().iter().zip(pred.sentences()) {
        total.add(count_sentence(g, p.labels().ok_or(Error::NeedsLabels)?)?);
    }
    Ok(total.metrics())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LengthBucket {
    One,
    Two,
    /// Three syllables, not an out-of-lexicon suffixed word.
    ThreeA,
    /// Three syllables, out of lexicon, ending in a suffix.
    ThreeB,
    FourA,
    FourB,
    FiveToNine,
    MoreThanNine,
}

impl LengthBucket {
    pub const ALL: [LengthBucket; 8] = [
        LengthBucket::One,
        LengthBucket::Two,
        LengthBucket::ThreeA,
        LengthBucket::ThreeB,
        LengthBucket::FourA,
        LengthBucket::FourB,
        LengthBucket::FiveToNine,
        LengthBucket::MoreThanNine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LengthBucket::One => "1",
            LengthBucket::Two => "2",
            LengthBucket::ThreeA => "3a",
            LengthBucket::ThreeB => "3b",
            LengthBucket::FourA => "4a",
            LengthBucket::FourB => "4b",
            LengthBucket::FiveToNine => "5-9",
            LengthBucket::MoreThanNine => ">9",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Bucket of a word given its normalized syllables.
    pub fn of(word: &[String], lexicon: &Lexicon, suffixes: &DerivedStats) -> LengthBucket {
        let suffixed_oov =
            || !lexicon.contains(word) && word.last().is_some_and(|s| suffixes.is_suffix(s));
        match word.len() {
            0 | 1 => LengthBucket::One,
            2 => LengthBucket::Two,
            3 if suffixed_oov() => LengthBucket::ThreeB,
            3 => LengthBucket::ThreeA,
            4 if suffixed_oov() => LengthBucket::FourB,
            4 => LengthBucket::FourA,
            5..=9 => LengthBucket::FiveToNine,
            _ => LengthBucket::MoreThanNine,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BucketReport {
    pub counts: [Counts; 8],
}

impl BucketReport {
    pub fn metrics(&self, bucket: LengthBucket) -> Metrics {
        self.counts[bucket.index()].metrics()
    }

    pub fn total(&self) -> Counts {
        let mut t = Counts::default();
        for c in &self.counts {
            t.add(*c);
        }
        t
    }

    /// Share of gold words in `bucket`, in percent.
    pub fn proportion(&self, bucket: LengthBucket) -> f64 {
        let total = self.total().gold;
        if total == 0 {
            0.0
        } else {
            100.0 * self.counts[bucket.index()].gold as f64 / total as f64
        }
    }
}

/// Per-length scores. Gold words are bucketed for recall, predicted words by
/// their own length and lexicon/suffix status for precision; a correct word
/// lands in the same bucket on both sides.
pub fn score_by_length(
    gold: &Corpus,
    pred: &Corpus,
    lexicon: &Lexicon,
    suffixes: &DerivedStats,
) -> Result<BucketReport> {
    check_aligned(gold, pred)?;
    let mut report = BucketReport::default();
    for (g, p) in gold.sentences().iter().zip(pred.sentences()) {
        let gold_spans = spans_from_labels(g.labels().ok_or(Error::NeedsLabels)?, g.len())?;
        let pred_spans = spans_from_labels(p.labels().ok_or(Error::NeedsLabels)?, p.len())?;
        let gold_set: HashSet<Span> = gold_spans.iter().copied().collect();
        let bucket = |&(a, b): &Span| LengthBucket::of(&g.norm()[a..=b], lexicon, suffixes);
        for span in &gold_spans {
            report.counts[bucket(span).index()].gold += 1;
        }
        for span in &pred_spans {
            let c = &mut report.counts[bucket(span).index()];
            c.pred += 1;
            if gold_set.contains(span) {
                c.correct += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct FoldResult {
    pub metrics: Metrics,
    /// Statistics derived from this fold's training split.
    pub stats: DerivedStats,
    pub train_size: usize,
    pub test_size: usize,
}

#[derive(Clone, Debug)]
pub struct CvReport {
    pub c: f64,
    pub config: FeatureConfig,
    /// One entry per fold; failures are kept as messages.
    pub folds: Vec<std::result::Result<FoldResult, String>>,
}

impl CvReport {
    /// Unweighted mean F1 over successful folds.
    pub fn mean_f1(&self) -> Option<f64> {
        self.mean(|m| m.f1)
    }

    pub fn mean_precision(&self) -> Option<f64> {
        self.mean(|m| m.precision)
    }

    pub fn mean_recall(&self) -> Option<f64> {
        self.mean(|m| m.recall)
    }

    fn mean(&self, pick: impl Fn(&Metrics) -> f64) -> Option<f64> {
        let ok: Vec<f64> = self
            .folds
            .iter()
            .filter_map(|f| f.as_ref().ok())
            .map(|f| pick(&f.metrics))
            .collect();
        (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64)
    }
}

/// Decodes `test` with a model trained on `train` and scores it.
pub fn run_fold(
    train: &Corpus,
    test: &Corpus,
    lexicon: &Lexicon,
    names: &NameLists,
    config: FeatureConfig,
    params: &SolverParams,
) -> Result<FoldResult> {
    test.require_labels()?;
    let model = train_model(train, lexicon, names, config, params)?;
    let mut total = Counts::default();
    for sentence in test.sentences() {
        let pred = model.predict(sentence, None);
        total.add(count_sentence(sentence, &pred)?);
    }
    Ok(FoldResult {
        metrics: total.metrics(),
        stats: model.stats,
        train_size: train.len(),
        test_size: test.len(),
    })
}

pub fn cross_validate(
    corpus: &Corpus,
    lexicon: &Lexicon,
    names: &NameLists,
    config: FeatureConfig,
    params: &SolverParams,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    corpus.require_labels()?;
    config.validate()?;
    let folds = split_folds(corpus, k, seed)?;
    let results = folds
        .par_iter()
        .map(|fold| {
            run_fold(&fold.train, &fold.test, lexicon, names, config, params)
                .map_err(|e| e.to_string())
        })
        .collect();
    Ok(CvReport {
        c: params.c,
        config,
        folds: results,
    })
}

pub const DEFAULT_C_GRID: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Clone, Debug)]
pub struct GridReport {
    pub config: FeatureConfig,
    /// Cells in ascending C order.
    pub cells: Vec<std::result::Result<CvReport, String>>,
    pub best_c: f64,
    pub best_f1: f64,
}

/// Cross-validates every C and keeps the best mean F1; ties go to the
/// smaller C.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    corpus: &Corpus,
    lexicon: &Lexicon,
    names: &NameLists,
    config: FeatureConfig,
    c_grid: &[f64],
    params: &SolverParams,
    k: usize,
    seed: u64,
) -> Result<GridReport> {
    if c_grid.is_empty() {
        return Err(Error::InvalidConfig("empty C grid".into()));
    }
    let mut grid = c_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let cells: Vec<std::result::Result<CvReport, String>> = grid
        .par_iter()
        .map(|&c| {
            let p = SolverParams { c, ..*params };
            cross_validate(corpus, lexicon, names, config, &p, k, seed).map_err(|e| e.to_string())
        })
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for cell in cells.iter().flatten() {
        if let Some(f1) = cell.mean_f1() {
            if best.is_none_or(|(_, b)| f1 > b) {
                best = Some((cell.c, f1));
            }
        }
    }
    let (best_c, best_f1) = best.ok_or_else(|| {
        let reasons: Vec<String> = cells
            .iter()
            .filter_map(|c| c.as_ref().err().cloned())
            .collect();
        Error::NotEnoughData(format!("every grid cell failed: {}", reasons.join("; ")))
    })?;
    Ok(GridReport {
        config,
        cells,
        best_c,
        best_f1,
    })
}

/// Grid search for each of the eight feature configurations that include
/// `base`.
pub fn ablation(
    corpus: &Corpus,
    lexicon: &Lexicon,
    names: &NameLists,
    c_grid: &[f64],
    params: &SolverParams,
    k: usize,
    seed: u64,
) -> Result<Vec<GridReport>> {
    FeatureConfig::ablation_grid()
        .par_iter()
        .map(|&config| grid_search(corpus, lexicon, names, config, c_grid, params, k, seed))
        .collect()
}
