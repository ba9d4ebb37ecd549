//! Greedy left-to-right decoding and line-stream segmentation.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::corpus::{parse_raw_sentence, render_with_labels, Label, Sentence};
use crate::error::{Error, Result};
use crate::model::LinearModel;
use crate::resources::Lexicon;

/// A trained model bound to the lexicon used at inference time.
#[derive(Clone, Copy, Debug)]
pub struct Segmenter<'m> {
    model: &'m LinearModel,
    lexicon: &'m Lexicon,
}

impl<'m> Segmenter<'m> {
    /// Uses the lexicon embedded in the model.
    pub fn new(model: &'m LinearModel) -> Self {
        Segmenter {
            model,
            lexicon: &model.lexicon,
        }
    }

    /// Overrides the lexicon; warns when its digest differs from the model's.
    pub fn with_lexicon(model: &'m LinearModel, lexicon: &'m Lexicon) -> Self {
        model.check_lexicon(lexicon);
        Segmenter { model, lexicon }
    }

    pub fn model(&self) -> &'m LinearModel {
        self.model
    }

    pub fn segment_sentence(&self, sentence: &Sentence) -> Vec<Label> {
        self.model.predict(sentence, Some(self.lexicon))
    }

    /// Segments one raw line into underscore format.
    pub fn segment_line(&self, line: &str) -> Result<String> {
        let sentence = parse_raw_sentence(line)?;
        let labels = self.segment_sentence(&sentence);
        render_with_labels(&sentence, &labels)
    }

    /// Segments every line of `input` into `output`, one line out per line in,
    /// in input order. Lines are processed in batches across `opts.workers`
    /// threads.
    ///
    /// A line that cannot be parsed (blank, or containing `_`) is reported on
    /// the log and echoed unchanged, unless `opts.strict` is set, in which
    /// case the first such line aborts with its error.
    pub fn segment_stream<R: BufRead, W: Write>(
        &self,
        input: R,
        mut output: W,
        opts: &StreamOptions,
    ) -> Result<StreamReport> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start workers: {e}")))?;
        let batch_size = opts.batch_size.max(1);
        let mut report = StreamReport::default();
        let mut lines = input.lines();
        loop {
            let mut batch = Vec::with_capacity(batch_size);
            for line in lines.by_ref().take(batch_size) {
                batch.push(line?);
            }
            if batch.is_empty() {
                break;
            }
            let results: Vec<Result<String>> =
                pool.install(|| batch.par_iter().map(|l| self.segment_line(l)).collect());
            for (offset, (line, result)) in batch.iter().zip(results).enumerate() {
                let line_no = report.lines + offset + 1;
                match result {
                    Ok(seg) => writeln!(output, "{seg}")?,
                    Err(e) if opts.strict => {
                        return Err(Error::BadInput(format!("line {line_no}: {e}")))
                    }
                    Err(e) => {
                        log::warn!("line {line_no}: {e}; echoed unsegmented");
                        report.malformed.push(line_no);
                        writeln!(output, "{line}")?;
                    }
                }
            }
            report.lines += batch.len();
        }
        output.flush()?;
        Ok(report)
    }
}

#[derive(Clone, Debug)]
pub struct StreamOptions {
    pub workers: usize,
    pub strict: bool,
    pub batch_size: usize,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            strict: false,
            batch_size: 1024,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamReport {
    pub lines: usize,
    /// 1-based numbers of lines echoed unsegmented.
    pub malformed: Vec<usize>,
}
