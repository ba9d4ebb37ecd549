//! Trained segmentation model and its text file format.
//!
//! A model file is UTF-8:
//!
//! ```text
//! UITWS-MODEL v1
//! key:value            (C, loss, tol, max_iter, seed, features, lexicon_id, counts)
//! [lexicon]            one entry per line, syllables space-separated
//! [family]             one syllable per line
//! [middle]
//! [sep_counts]         syllable<TAB>a<TAB>b<TAB>separable(0|1)
//! [suffix_counts]      syllable<TAB>count<TAB>suffix(0|1)
//! [weights]            feature<TAB>weight, in vocabulary index order
//! END
//! ```
//!
//! Reals are written with 17 significant digits so a save/load round trip is
//! exact. Everything except the weights is sorted, so training twice on the
//! same inputs yields byte-identical files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::corpus::{Corpus, Label, Sentence};
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureConfig, FeatureVocabulary, GapContext};
use crate::resources::{Lexicon, NameLists};
use crate::stats::DerivedStats;
use crate::svm::{self, Loss, SolverParams, SparseVector, TrainSet};

pub const MODEL_HEADER: &str = "UITWS-MODEL v1";
const HEADER_PREFIX: &str = "UITWS-MODEL ";

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub vocab: FeatureVocabulary,
    pub config: FeatureConfig,
    pub stats: DerivedStats,
    pub lexicon: Lexicon,
    pub names: NameLists,
    pub lexicon_id: String,
    pub params: SolverParams,
}

/// Builds the per-gap training set with gold previous labels.
pub fn build_train_set(
    corpus: &Corpus,
    extractor: &Extractor<'_>,
    vocab: &mut FeatureVocabulary,
) -> Result<TrainSet> {
    corpus.require_labels()?;
    let mut set = TrainSet::new();
    for sentence in corpus.sentences() {
        let labels = sentence.labels().ok_or(Error::NeedsLabels)?;
        for (i, &label) in labels.iter().enumerate() {
            let ctx = GapContext::new(sentence, i, &labels[..i])?;
            let x = vocab.intern(&extractor.extract(&ctx));
            set.push(x, label);
        }
    }
    set.set_dim(vocab.len());
    Ok(set)
}

/// Derives statistics from `corpus`, builds the vocabulary, and fits the SVM.
pub fn train_model(
    corpus: &Corpus,
    lexicon: &Lexicon,
    names: &NameLists,
    config: FeatureConfig,
    params: &SolverParams,
) -> Result<LinearModel> {
    config.validate()?;
    corpus.require_labels()?;
    let stats = DerivedStats::compute(corpus, lexicon)?;
    let extractor = Extractor::new(config, lexicon, names, &stats);
    let mut vocab = FeatureVocabulary::new();
    let set = build_train_set(corpus, &extractor, &mut vocab)?;
    if set.is_empty() {
        return Err(Error::NotEnoughData(
            "training corpus has no inter-syllable gaps".into(),
        ));
    }
    vocab.freeze();
    let solution = svm::train(&set, params)?;
    if !solution.converged {
        log::warn!(
            "solver stopped after {} epochs without reaching tol {}",
            solution.epochs,
            params.tol
        );
    }
    Ok(LinearModel {
        weights: solution.weights,
        vocab,
        config,
        stats,
        lexicon: lexicon.clone(),
        names: names.clone(),
        lexicon_id: lexicon.digest(),
        params: *params,
    })
}

impl LinearModel {
    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights)
    }

    pub fn c(&self) -> f64 {
        self.params.c
    }

    /// Predicts gap labels left to right, feeding earlier predictions into
    /// later feature extraction. `lexicon` defaults to the embedded one.
    pub fn predict(&self, sentence: &Sentence, lexicon: Option<&Lexicon>) -> Vec<Label> {
        let lexicon = lexicon.unwrap_or(&self.lexicon);
        let extractor = Extractor::new(self.config, lexicon, &self.names, &self.stats);
        let mut labels = Vec::with_capacity(sentence.gaps());
        for i in 0..sentence.gaps() {
            let ctx = GapContext::new(sentence, i, &labels)
                .expect("gap index and label prefix are in range");
            let x = self.vocab.realize(&extractor.extract(&ctx));
            labels.push(svm::label_for(self.decision(&x)));
        }
        labels
    }

    /// True when `lexicon` matches the one the model was trained with; logs a
    /// warning otherwise.
    pub fn check_lexicon(&self, lexicon: &Lexicon) -> bool {
        let id = lexicon.digest();
        if id != self.lexicon_id {
            log::warn!(
                "lexicon digest {} differs from the training lexicon {}",
                &id[..12],
                &self.lexicon_id[..self.lexicon_id.len().min(12)]
            );
            return false;
        }
        true
    }

    pub fn to_text(&self) -> Result<String> {
        if self.vocab.is_empty() {
            return Err(Error::BadInput(
                "refusing to save a model with an empty vocabulary".into(),
            ));
        }
        if self.weights.len() != self.vocab.len() {
            return Err(Error::BadInput(format!(
                "{} weights for {} features",
                self.weights.len(),
                self.vocab.len()
            )));
        }
        let entries = self.lexicon.entries();
        let family: BTreeSet<&str> = self.names.family().collect();
        let middle: BTreeSet<&str> = self.names.middle().collect();

        let mut out = String::new();
        out.push_str(MODEL_HEADER);
        out.push('\n');
        let _ = writeln!(out, "C:{}", real(self.params.c));
        let _ = writeln!(out, "loss:{}", self.params.loss);
        let _ = writeln!(out, "tol:{}", real(self.params.tol));
        let _ = writeln!(out, "max_iter:{}", self.params.max_iter);
        let _ = writeln!(out, "seed:{}", self.params.seed);
        let _ = writeln!(out, "features:{}", self.config.to_list());
        let _ = writeln!(out, "lexicon_id:{}", self.lexicon_id);
        let _ = writeln!(out, "lexicon_size:{}", entries.len());
        let _ = writeln!(out, "family_size:{}", family.len());
        let _ = writeln!(out, "middle_size:{}", middle.len());
        let _ = writeln!(out, "sep_counts_size:{}", self.stats.sep_counts.len());
        let _ = writeln!(out, "suffix_counts_size:{}", self.stats.suffix_counts.len());
        let _ = writeln!(out, "vocab_size:{}", self.vocab.len());

        out.push_str("[lexicon]\n");
        for e in &entries {
            out.push_str(e);
            out.push('\n');
        }
        out.push_str("[family]\n");
        for f in &family {
            out.push_str(f);
            out.push('\n');
        }
        out.push_str("[middle]\n");
        for m in &middle {
            out.push_str(m);
            out.push('\n');
        }
        out.push_str("[sep_counts]\n");
        for (syl, (a, b)) in &self.stats.sep_counts {
            let flag = u8::from(self.stats.separable.contains(syl));
            let _ = writeln!(out, "{syl}\t{a}\t{b}\t{flag}");
        }
        out.push_str("[suffix_counts]\n");
        for (syl, count) in &self.stats.suffix_counts {
            let flag = u8::from(self.stats.suffixes.contains(syl));
            let _ = writeln!(out, "{syl}\t{count}\t{flag}");
        }
        out.push_str("[weights]\n");
        for (name, w) in self.vocab.names().iter().zip(&self.weights) {
            let _ = writeln!(out, "{name}\t{}", real(*w));
        }
        out.push_str("END\n");
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = self.to_text()?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        ModelReader::new(text).read()
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

struct ModelReader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    keys: BTreeMap<&'a str, &'a str>,
}

impl<'a> ModelReader<'a> {
    fn new(text: &'a str) -> Self {
        ModelReader {
            lines: text.lines().enumerate().peekable(),
            keys: BTreeMap::new(),
        }
    }

    fn read(mut self) -> Result<LinearModel> {
        match self.lines.next() {
            Some((_, MODEL_HEADER)) => {}
            Some((_, other)) if other.starts_with(HEADER_PREFIX) => {
                return Err(Error::ModelVersion(other.to_string()))
            }
            _ => return Err(Error::ModelVersion("missing model header".into())),
        }
        while let Some(&(no, line)) = self.lines.peek() {
            if line.starts_with('[') {
                break;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::model_format(no + 1, "expected key:value"))?;
            self.keys.insert(k, v);
            self.lines.next();
        }

        let c: f64 = self.key("C")?;
        let loss: Loss = self.key("loss")?;
        let tol: f64 = self.key("tol")?;
        let max_iter: usize = self.key("max_iter")?;
        let seed: u64 = self.key("seed")?;
        let config: FeatureConfig = self.key("features")?;
        let lexicon_id: String = self.key("lexicon_id")?;

        let entries = self.section("lexicon", self.key("lexicon_size")?)?;
        let lexicon = Lexicon::from_lines(entries.iter().copied())?;
        if lexicon.digest() != lexicon_id {
            return Err(Error::model_format(
                0,
                "embedded lexicon does not match lexicon_id",
            ));
        }
        let family = self.section("family", self.key("family_size")?)?;
        let middle = self.section("middle", self.key("middle_size")?)?;
        let names = NameLists::new(family, middle);

        let mut stats = DerivedStats::default();
        let sep_lines = self.section("sep_counts", self.key("sep_counts_size")?)?;
        for line in sep_lines {
            let cols: Vec<&str> = line.split('\t').collect();
            let [syl, a, b, flag] = cols[..] else {
                return Err(Error::model_format(
                    0,
                    format!("bad sep_counts row {line:?}"),
                ));
            };
            stats
                .sep_counts
                .insert(syl.to_string(), (parse(a, "count")?, parse(b, "count")?));
            if flag == "1" {
                stats.separable.insert(syl.to_string());
            }
        }
        let sfx_lines = self.section("suffix_counts", self.key("suffix_counts_size")?)?;
        for line in sfx_lines {
            let cols: Vec<&str> = line.split('\t').collect();
            let [syl, count, flag] = cols[..] else {
                return Err(Error::model_format(
                    0,
                    format!("bad suffix_counts row {line:?}"),
                ));
            };
            stats
                .suffix_counts
                .insert(syl.to_string(), parse(count, "count")?);
            if flag == "1" {
                stats.suffixes.insert(syl.to_string());
            }
        }

        let weight_lines = self.section("weights", self.key("vocab_size")?)?;
        let mut names_in_order = Vec::with_capacity(weight_lines.len());
        let mut weights = Vec::with_capacity(weight_lines.len());
        for line in weight_lines {
            let (name, w) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::model_format(0, format!("bad weight row {line:?}")))?;
            names_in_order.push(name.to_string());
            weights.push(parse::<f64>(w, "weight")?);
        }
        if weights.is_empty() {
            return Err(Error::model_format(0, "model has no features"));
        }
        match self.lines.next() {
            Some((_, "END")) => {}
            Some((no, _)) => return Err(Error::model_format(no + 1, "expected END")),
            None => return Err(Error::model_format(0, "truncated model: missing END")),
        }
        let vocab = FeatureVocabulary::from_names(names_in_order)?;

        Ok(LinearModel {
            weights,
            vocab,
            config,
            stats,
            lexicon,
            names,
            lexicon_id,
            params: SolverParams {
                c,
                tol,
                max_iter,
                seed,
                loss,
            },
        })
    }

    fn key<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .keys
            .get(key)
            .ok_or_else(|| Error::model_format(0, format!("missing key {key}")))?;
        raw.parse()
            .map_err(|_| Error::model_format(0, format!("bad value for {key}: {raw:?}")))
    }

    fn section(&mut self, name: &str, expected: usize) -> Result<Vec<&'a str>> {
        let header = format!("[{name}]");
        match self.lines.next() {
            Some((_, line)) if line == header => {}
            Some((no, line)) => {
                return Err(Error::model_format(
                    no + 1,
                    format!("expected {header}, got {line:?}"),
                ))
            }
            None => {
                return Err(Error::model_format(
                    0,
                    format!("truncated model: missing {header}"),
                ))
            }
        }
        let mut rows = Vec::with_capacity(expected);
        for _ in 0..expected {
            match self.lines.next() {
                Some((_, line)) => rows.push(line),
                None => {
                    return Err(Error::model_format(
                        0,
                        format!("truncated model: {header} has fewer than {expected} rows"),
                    ))
                }
            }
        }
        Ok(rows)
    }
}

fn parse<T: FromStr>(raw: &str, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::model_format(0, format!("bad {what} {raw:?}")))
}
