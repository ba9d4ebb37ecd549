//! Plain tables rendered either aligned for reading or as CSV.

use std::fmt::Write;

use crate::eval::{BucketReport, CvReport, GridReport, LengthBucket, Metrics};
use crate::stats::{LengthDistribution, LENGTH_BUCKETS};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    /// Columns padded to their widest cell; the first column is left-aligned,
    /// the rest right-aligned.
    pub fn to_text(&self) -> String {
        let ncol = self.header.len();
        let mut width = vec![0; ncol];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = String::new();
            for (k, (cell, w)) in row.iter().zip(&width).enumerate() {
                if k > 0 {
                    line.push_str("  ");
                }
                let pad = w - cell.chars().count();
                if k == 0 {
                    line.push_str(cell);
                    line.extend(std::iter::repeat_n(' ', pad));
                } else {
                    line.extend(std::iter::repeat_n(' ', pad));
                    line.push_str(cell);
                }
            }
            writeln!(out, "{}", line.trim_end()).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        for row in std::iter::once(&self.header).chain(&self.rows) {
            writer.write_record(row).expect("writing to memory");
        }
        let bytes = writer.into_inner().expect("writing to memory");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }
}

impl Table {
    /// Tab-separated, one row per line; tabs inside cells become spaces.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row.iter().map(|c| c.replace('\t', " ")).collect();
            writeln!(out, "{}", cells.join("\t")).unwrap();
        }
        out
    }
}

/// A ratio in [0, 1] as a percentage with four decimals.
pub fn pct(x: f64) -> String {
    format!("{:.4}", 100.0 * x)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), pct)
}

pub fn metrics_table(m: &Metrics) -> Table {
    let mut t = Table::new(["metric", "value"]);
    t.push(["precision".to_string(), pct(m.precision)]);
    t.push(["recall".to_string(), pct(m.recall)]);
    t.push(["f1".to_string(), pct(m.f1)]);
    t.push(["gold_words".to_string(), m.counts.gold.to_string()]);
    t.push(["pred_words".to_string(), m.counts.pred.to_string()]);
    t.push(["correct_words".to_string(), m.counts.correct.to_string()]);
    t
}

pub fn bucket_table(report: &BucketReport) -> Table {
    let mut t = Table::new([
        "bucket",
        "share",
        "gold",
        "pred",
        "correct",
        "precision",
        "recall",
        "f1",
    ]);
    let mut row = |name: &str, share: String, m: Metrics| {
        t.push([
            name.to_string(),
            share,
            m.counts.gold.to_string(),
            m.counts.pred.to_string(),
            m.counts.correct.to_string(),
            pct(m.precision),
            pct(m.recall),
            pct(m.f1),
        ]);
    };
    for bucket in LengthBucket::ALL {
        row(
            bucket.name(),
            format!("{:.4}", report.proportion(bucket)),
            report.metrics(bucket),
        );
    }
    row("all", format!("{:.4}", 100.0), report.total().metrics());
    t
}

pub fn cv_table(report: &CvReport) -> Table {
    let mut t = Table::new([
        "fold",
        "train",
        "test",
        "precision",
        "recall",
        "f1",
        "status",
    ]);
    for (k, fold) in report.folds.iter().enumerate() {
        match fold {
            Ok(f) => t.push([
                (k + 1).to_string(),
                f.train_size.to_string(),
                f.test_size.to_string(),
                pct(f.metrics.precision),
                pct(f.metrics.recall),
                pct(f.metrics.f1),
                "ok".to_string(),
            ]),
            Err(e) => t.push([
                (k + 1).to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("failed: {e}"),
            ]),
        }
    }
    t.push([
        "mean".to_string(),
        String::new(),
        String::new(),
        opt_pct(report.mean_precision()),
        opt_pct(report.mean_recall()),
        opt_pct(report.mean_f1()),
        String::new(),
    ]);
    t
}

pub fn grid_table(report: &GridReport) -> Table {
    let mut t = Table::new(["c", "mean_f1", "status"]);
    for cell in &report.cells {
        match cell {
            Ok(cv) => t.push([cv.c.to_string(), opt_pct(cv.mean_f1()), "ok".to_string()]),
            Err(e) => t.push([String::new(), String::new(), format!("failed: {e}")]),
        }
    }
    t
}

pub fn ablation_table(rows: &[GridReport]) -> Table {
    let mut t = Table::new(["features", "best_c", "mean_f1"]);
    for row in rows {
        t.push([
            row.config.to_string(),
            row.best_c.to_string(),
            pct(row.best_f1),
        ]);
    }
    t
}

pub fn length_table(dist: &LengthDistribution) -> Table {
    let mut t = Table::new(["syllables", "words", "share"]);
    for ((name, count), share) in LENGTH_BUCKETS
        .iter()
        .zip(dist.counts)
        .zip(dist.percentages())
    {
        t.push([name.to_string(), count.to_string(), format!("{share:.4}")]);
    }
    t
}
