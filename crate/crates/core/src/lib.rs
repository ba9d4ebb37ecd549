//! Word segmentation for syllable-delimited text.
//!
//! Every gap between two adjacent syllables is classified as word-internal
//! (`_`) or a word boundary (space) by a linear SVM, decoding greedily from
//! left to right so that earlier decisions feed later features.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod report;
pub mod resources;
pub mod segmenter;
pub mod stats;
pub mod svm;

pub use corpus::{Corpus, Label, Sentence, SyllableType};
pub use error::{Error, Result};
pub use eval::Metrics;
pub use features::FeatureConfig;
pub use model::{train_model, LinearModel, MODEL_HEADER};
pub use resources::{Lexicon, NameLists};
pub use segmenter::{Segmenter, StreamOptions};
pub use stats::DerivedStats;
pub use svm::{Loss, SolverParams};

/// Toolkit and model-format versions, as printed by `--version`.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (model format UITWS-MODEL v1)");
