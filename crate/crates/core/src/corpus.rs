//! Documents, corpora and the ordered per-label train/dev split.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// 0-based position in the input.
    pub id: usize,
    pub text: String,
    pub label: Option<String>,
}

impl Document {
    pub fn new(id: usize, text: impl Into<String>, label: Option<String>) -> Self {
        Self {
            id,
            text: text.into(),
            label,
        }
    }

    pub fn labeled(id: usize, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self::new(id, text, Some(label.into()))
    }
}

/// An ordered sequence of documents. Order is significant: the split and
/// the adaptation tie-breaks depend on it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Self {
        Self { docs }
    }

    /// Builds a labeled corpus with ids assigned in order.
    pub fn from_labeled<S, L, I>(items: I) -> Self
    where
        S: Into<String>,
        L: Into<String>,
        I: IntoIterator<Item = (S, L)>,
    {
        let docs = items
            .into_iter()
            .enumerate()
            .map(|(id, (text, label))| Document::labeled(id, text, label))
            .collect();
        Self { docs }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn label_set(&self) -> BTreeSet<String> {
        self.docs.iter().filter_map(|d| d.label.clone()).collect()
    }

    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for label in self.docs.iter().filter_map(|d| d.label.as_ref()) {
            *counts.entry(label.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn is_labeled(&self) -> bool {
        self.docs.iter().all(|d| d.label.is_some())
    }

    /// Returns the documents grouped by label, each group in corpus order.
    pub fn by_label(&self) -> Result<BTreeMap<&str, Vec<&Document>>> {
        let mut groups: BTreeMap<&str, Vec<&Document>> = BTreeMap::new();
        for doc in &self.docs {
            let label = doc.label.as_deref().ok_or(Error::MissingLabel(doc.id))?;
            groups.entry(label).or_default().push(doc);
        }
        Ok(groups)
    }
}

/// A label that ended up with no documents on one side of a split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWarning {
    pub label: String,
    pub empty_side: SplitSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    Train,
    Dev,
}

/// Sends the first `floor(fraction * n)` documents of every label to the
/// first corpus and the rest to the second, keeping corpus order on both
/// sides. Document ids are left untouched.
pub fn ordered_split(
    corpus: &Corpus,
    train_fraction: f64,
) -> Result<(Corpus, Corpus, Vec<SplitWarning>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidFraction(train_fraction));
    }
    let counts = corpus.by_label()?;
    let quota: BTreeMap<&str, usize> = counts
        .iter()
        .map(|(label, docs)| (*label, floor_fraction(train_fraction, docs.len())))
        .collect();

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut train = Vec::new();
    let mut dev = Vec::new();
    for doc in &corpus.docs {
        let label = doc.label.as_deref().ok_or(Error::MissingLabel(doc.id))?;
        let taken = seen.entry(label).or_insert(0);
        if *taken < quota[label] {
            train.push(doc.clone());
        } else {
            dev.push(doc.clone());
        }
        *taken += 1;
    }

    let mut warnings = Vec::new();
    for (label, docs) in &counts {
        let n_train = quota[label];
        if n_train == 0 {
            warnings.push(SplitWarning {
                label: (*label).into(),
                empty_side: SplitSide::Train,
            });
        }
        if n_train == docs.len() {
            warnings.push(SplitWarning {
                label: (*label).into(),
                empty_side: SplitSide::Dev,
            });
        }
    }
    Ok((Corpus::new(train), Corpus::new(dev), warnings))
}

// floor(fraction * n), guarded against products like 0.9 * 10 = 8.999...
fn floor_fraction(fraction: f64, n: usize) -> usize {
    let exact = fraction * n as f64;
    let rounded = libm::round(exact);
    if libm::fabs(exact - rounded) < 1e-9 * (1.0 + exact) {
        rounded as usize
    } else {
        libm::floor(exact) as usize
    }
}
