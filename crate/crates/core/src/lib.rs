//! Character n-gram language identification for short, code-mixed texts.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the pure parts of
//! the pipeline:
//!
//! - [`text`]: alphabetic normalization into words.
//! - [`corpus`]: documents, corpora and the ordered per-label split.
//! - [`ngram`]: padded character n-gram extraction and per-language count models.
//! - [`scorers`]: simple scoring, sum of relative frequencies and Naive Bayes.
//! - [`heli`]: the word-level backoff identifier over words and n-grams in both casings.
//! - [`adaptation`]: confidence-ordered, split-wise adaptation of the models to a test set.
//! - [`eval`]: confusion matrices and macro/micro F1.
//! - [`synth`]: a seeded generator of synthetic code-mixed corpora.
//!
//! File formats, corpus loading, parameter sweeps and the command line live in
//! the `mixlid` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptation;
pub mod corpus;
mod error;
pub mod eval;
pub mod heli;
pub mod ngram;
pub mod scorers;
pub mod synth;
pub mod text;

pub use crate::adaptation::{adaptive_identify, AdaptConfig, Identifier, Splits, TraceRow};
pub use crate::corpus::{ordered_split, Corpus, Document, SplitWarning};
pub use crate::error::{Error, Result};
pub use crate::eval::{evaluate, evaluate_predictions, ClassMetrics, EvalReport};
pub use crate::heli::{HeliConfig, HeliModelSet, HeliPenalty};
pub use crate::ngram::{FeatureConfig, ModelSet, NgramModel, NgramRange, MAX_NGRAM};
pub use crate::scorers::{classify, Method, NgramClassifier, Polarity, Prediction};
pub use crate::synth::{generate, Lcg, SynthLanguage, SynthSpec};
pub use crate::text::{normalize, NormalizedText};
