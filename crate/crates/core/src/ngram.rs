//! Space-padded character n-grams and per-language frequency models.
//!
//! Counts are kept per (language, length). The relative frequency of a gram
//! of length `L` is `count / totals[L]` and the smoothing value for a gram
//! missing from the model is `pm * ln(totals[L])`, i.e. `pm` times the
//! negative log relative frequency of a gram seen once. Logs are natural.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::text::{normalize, NormalizedText};

/// Longest gram length a model may hold.
pub const MAX_NGRAM: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NgramRange {
    min: usize,
    max: usize,
}

impl NgramRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min == 0 || min > max || max > MAX_NGRAM {
            return Err(Error::InvalidRange {
                min,
                max,
                limit: MAX_NGRAM,
            });
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> usize {
        self.min
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }

    pub fn lengths(&self) -> core::ops::RangeInclusive<usize> {
        self.min..=self.max
    }

    pub fn width(&self) -> usize {
        self.max - self.min + 1
    }
}

impl fmt::Display for NgramRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.min, self.max)
    }
}

impl FromStr for NgramRange {
    type Err = Error;

    /// Parses `"2-6"` or a single length `"4"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRange {
            min: 0,
            max: 0,
            limit: MAX_NGRAM,
        };
        let (lo, hi) = match s.trim().split_once('-') {
            Some((lo, hi)) => (lo, hi),
            None => (s.trim(), s.trim()),
        };
        let min = lo.trim().parse().map_err(|_| bad())?;
        let max = hi.trim().parse().map_err(|_| bad())?;
        Self::new(min, max)
    }
}

/// How documents are turned into grams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    pub lowercase: bool,
    /// Pad each word as `" w "` before cutting grams.
    pub padding: bool,
    /// Glue all words of a document into one before padding.
    pub concat: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            padding: true,
            concat: false,
        }
    }
}

/// Calls `f(n, gram)` for every gram of every length in `range` cut from
/// `word`, in order of increasing length and then position.
pub fn visit_word_ngrams<F>(word: &str, range: NgramRange, padding: bool, f: &mut F)
where
    F: FnMut(usize, &str),
{
    let mut padded = String::with_capacity(word.len() + 2);
    if padding {
        padded.push(' ');
    }
    padded.push_str(word);
    if padding {
        padded.push(' ');
    }
    let mut bounds: Vec<usize> = padded.char_indices().map(|(i, _)| i).collect();
    bounds.push(padded.len());
    let chars = bounds.len() - 1;
    for n in range.lengths() {
        if n > chars {
            break;
        }
        for start in 0..=chars - n {
            f(n, &padded[bounds[start]..bounds[start + n]]);
        }
    }
}

/// Visits the grams of a normalized document under `config`.
pub fn visit_ngrams<F>(norm: &NormalizedText, range: NgramRange, config: &FeatureConfig, mut f: F)
where
    F: FnMut(usize, &str),
{
    if config.concat {
        if !norm.is_empty() {
            let joined = norm.concatenated(config.lowercase);
            visit_word_ngrams(&joined, range, config.padding, &mut f);
        }
        return;
    }
    for word in norm.words_in(config.lowercase) {
        visit_word_ngrams(word, range, config.padding, &mut f);
    }
}

/// The multiset of grams of a document, as a list with repetitions.
pub fn extract_ngrams(
    norm: &NormalizedText,
    range: NgramRange,
    config: &FeatureConfig,
) -> Vec<String> {
    let mut out = Vec::new();
    visit_ngrams(norm, range, config, |_, g| out.push(String::from(g)));
    out
}

/// Number of length-`n` grams in a padded word of `chars` characters.
pub fn gram_count(chars: usize, n: usize) -> usize {
    (chars + 3).saturating_sub(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    language: String,
    range: NgramRange,
    penalty_modifier: f64,
    /// Indexed by `length - range.min`.
    counts: Vec<HashMap<String, u64>>,
    totals: Vec<u64>,
    penalties: Vec<f64>,
}

impl NgramModel {
    pub fn empty(
        language: impl Into<String>,
        range: NgramRange,
        penalty_modifier: f64,
    ) -> Result<Self> {
        check_pm(penalty_modifier)?;
        Ok(Self {
            language: language.into(),
            range,
            penalty_modifier,
            counts: (0..range.width()).map(|_| HashMap::new()).collect(),
            totals: alloc::vec![0; range.width()],
            penalties: alloc::vec![0.0; range.width()],
        })
    }

    /// Builds a model from explicit `(gram, count)` entries. Gram lengths are
    /// taken from the character count and must fall inside `range`.
    pub fn from_counts<'a, I>(
        language: impl Into<String>,
        range: NgramRange,
        penalty_modifier: f64,
        entries: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut model = Self::empty(language, range, penalty_modifier)?;
        for (gram, count) in entries {
            let n = gram.chars().count();
            if !range.contains(n) {
                return Err(Error::InvalidEntry {
                    gram: gram.into(),
                    reason: "length outside model range",
                });
            }
            if count == 0 {
                return Err(Error::InvalidEntry {
                    gram: gram.into(),
                    reason: "count must be at least 1",
                });
            }
            model.add(n, gram, count);
        }
        model.refresh()?;
        Ok(model)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn range(&self) -> NgramRange {
        self.range
    }

    pub fn penalty_modifier(&self) -> f64 {
        self.penalty_modifier
    }

    #[inline]
    pub fn count(&self, n: usize, gram: &str) -> u64 {
        if !self.range.contains(n) {
            return 0;
        }
        self.counts[n - self.range.min]
            .get(gram)
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> u64 {
        if self.range.contains(n) {
            self.totals[n - self.range.min]
        } else {
            0
        }
    }

    /// Smoothing value for a missing gram of length `n`. A length with no
    /// training grams borrows the penalty of the nearest populated length,
    /// shorter lengths first.
    pub fn penalty(&self, n: usize) -> f64 {
        self.penalties[n - self.range.min]
    }

    pub fn relative_frequency(&self, n: usize, gram: &str) -> f64 {
        let count = self.count(n, gram);
        if count == 0 {
            0.0
        } else {
            count as f64 / self.total(n) as f64
        }
    }

    /// Number of distinct grams of length `n`.
    pub fn distinct(&self, n: usize) -> usize {
        self.counts[n - self.range.min].len()
    }

    /// All `(length, gram, count)` rows, sorted by length then gram.
    pub fn rows(&self) -> Vec<(usize, &str, u64)> {
        let mut rows = Vec::new();
        for (offset, table) in self.counts.iter().enumerate() {
            let mut grams: Vec<(&str, u64)> = table.iter().map(|(g, c)| (g.as_str(), *c)).collect();
            grams.sort_unstable();
            rows.extend(
                grams
                    .into_iter()
                    .map(|(g, c)| (offset + self.range.min, g, c)),
            );
        }
        rows
    }

    fn add(&mut self, n: usize, gram: &str, count: u64) {
        let offset = n - self.range.min;
        match self.counts[offset].get_mut(gram) {
            Some(c) => *c += count,
            None => {
                self.counts[offset].insert(String::from(gram), count);
            }
        }
        self.totals[offset] += count;
    }

    fn refresh(&mut self) -> Result<()> {
        if self.totals.iter().all(|&t| t == 0) {
            return Err(Error::EmptyLanguage(self.language.clone()));
        }
        fill_penalties(&self.totals, self.penalty_modifier, &mut self.penalties);
        Ok(())
    }
}

/// `penalties[i] = pm * ln(totals[i])`; empty slots take the value of the
/// nearest populated slot, preferring lower indices. At least one slot must
/// be populated.
pub(crate) fn fill_penalties(totals: &[u64], pm: f64, penalties: &mut [f64]) {
    for (i, slot) in penalties.iter_mut().enumerate() {
        let source = if totals[i] > 0 {
            Some(i)
        } else {
            (0..i)
                .rev()
                .find(|&j| totals[j] > 0)
                .or_else(|| (i + 1..totals.len()).find(|&j| totals[j] > 0))
        };
        *slot = match source {
            Some(j) => pm * libm::log(totals[j] as f64),
            None => 0.0,
        };
    }
}

pub(crate) fn check_pm(pm: f64) -> Result<()> {
    if pm.is_finite() && pm > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPenaltyModifier(pm))
    }
}

/// One [`NgramModel`] per language, all sharing range, penalty modifier and
/// feature configuration. Languages are kept sorted by code.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    range: NgramRange,
    penalty_modifier: f64,
    features: FeatureConfig,
    models: Vec<NgramModel>,
}

impl ModelSet {
    /// Trains one model per label of `train`.
    pub fn build(
        train: &Corpus,
        range: NgramRange,
        penalty_modifier: f64,
        features: FeatureConfig,
    ) -> Result<Self> {
        check_pm(penalty_modifier)?;
        let groups = train.by_label()?;
        let mut models = Vec::with_capacity(groups.len());
        for (label, docs) in groups {
            let mut model = NgramModel::empty(label, range, penalty_modifier)?;
            for doc in docs {
                let norm = normalize(&doc.text);
                visit_ngrams(&norm, range, &features, |n, g| model.add(n, g, 1));
            }
            model.refresh()?;
            models.push(model);
        }
        Self::from_models(range, penalty_modifier, features, models)
    }

    pub fn from_models(
        range: NgramRange,
        penalty_modifier: f64,
        features: FeatureConfig,
        mut models: Vec<NgramModel>,
    ) -> Result<Self> {
        check_pm(penalty_modifier)?;
        if models.is_empty() {
            return Err(Error::NoLanguages);
        }
        if models
            .iter()
            .any(|m| m.range != range || m.penalty_modifier != penalty_modifier)
        {
            return Err(Error::InconsistentModels);
        }
        models.sort_by(|a, b| a.language.cmp(&b.language));
        if models.windows(2).any(|w| w[0].language == w[1].language) {
            return Err(Error::InconsistentModels);
        }
        Ok(Self {
            range,
            penalty_modifier,
            features,
            models,
        })
    }

    pub fn range(&self) -> NgramRange {
        self.range
    }

    pub fn penalty_modifier(&self) -> f64 {
        self.penalty_modifier
    }

    pub fn features(&self) -> &FeatureConfig {
        &self.features
    }

    pub fn models(&self) -> &[NgramModel] {
        &self.models
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.models.iter().map(|m| m.language.as_str())
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn index_of(&self, language: &str) -> Option<usize> {
        self.models
            .binary_search_by(|m| m.language.as_str().cmp(language))
            .ok()
    }

    pub fn model(&self, language: &str) -> Option<&NgramModel> {
        self.index_of(language).map(|i| &self.models[i])
    }

    /// Same counts under a different penalty modifier.
    pub fn with_penalty_modifier(&self, penalty_modifier: f64) -> Result<Self> {
        check_pm(penalty_modifier)?;
        let mut out = self.clone();
        out.penalty_modifier = penalty_modifier;
        for model in &mut out.models {
            model.penalty_modifier = penalty_modifier;
            model.refresh()?;
        }
        Ok(out)
    }

    /// Adds the grams of `doc` to the model of `language`.
    pub fn add_document(&mut self, doc: &Document, language: &str) -> Result<()> {
        let index = self
            .index_of(language)
            .ok_or_else(|| Error::UnknownLanguage(language.into()))?;
        self.add_text(&doc.text, index);
        Ok(())
    }

    pub(crate) fn add_text(&mut self, text: &str, index: usize) {
        let norm = normalize(text);
        if norm.is_empty() {
            return;
        }
        let range = self.range;
        let features = self.features;
        let model = &mut self.models[index];
        visit_ngrams(&norm, range, &features, |n, g| model.add(n, g, 1));
        // cannot fail: the model already held grams
        let _ = model.refresh();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn range(a: usize, b: usize) -> NgramRange {
        NgramRange::new(a, b).unwrap()
    }

    fn grams(text: &str, r: NgramRange) -> Vec<String> {
        extract_ngrams(&normalize(text), r, &FeatureConfig::default())
    }

    #[test]
    fn range_validation() {
        assert!(NgramRange::new(0, 3).is_err());
        assert!(NgramRange::new(4, 3).is_err());
        assert!(NgramRange::new(1, 13).is_err());
        assert_eq!("2-6".parse::<NgramRange>().unwrap(), range(2, 6));
        assert_eq!("3".parse::<NgramRange>().unwrap(), range(3, 3));
        assert_eq!(alloc::format!("{}", range(7, 10)), "7-10");
    }

    #[test]
    fn bigrams_of_ab() {
        assert_eq!(grams("ab", range(2, 2)), vec![" a", "ab", "b "]);
    }

    #[test]
    fn padded_single_letter() {
        assert_eq!(
            grams("a", range(1, 3)),
            vec![" ", "a", " ", " a", "a ", " a "]
        );
    }

    #[test]
    fn repeated_words_accumulate() {
        let g = grams("ab ab", range(2, 2));
        assert_eq!(g.iter().filter(|x| *x == "ab").count(), 2);
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn unpadded_and_concatenated() {
        let norm = normalize("ab, cd");
        let plain = FeatureConfig {
            padding: false,
            ..Default::default()
        };
        assert_eq!(extract_ngrams(&norm, range(2, 2), &plain), vec!["ab", "cd"]);
        let glued = FeatureConfig {
            concat: true,
            ..Default::default()
        };
        assert_eq!(
            extract_ngrams(&norm, range(2, 2), &glued),
            vec![" a", "ab", "bc", "cd", "d "]
        );
    }

    #[test]
    fn two_doc_fixture() {
        let corpus = Corpus::from_labeled(vec![("aa", "A"), ("bb", "B")]);
        let set = ModelSet::build(&corpus, range(1, 1), 2.0, FeatureConfig::default()).unwrap();
        let a = set.model("A").unwrap();
        assert_eq!(a.count(1, " "), 2);
        assert_eq!(a.count(1, "a"), 2);
        assert_eq!(a.total(1), 4);
        assert_eq!(a.distinct(1), 2);
    }

    #[test]
    fn penalty_from_totals() {
        let entries: Vec<(String, u64)> = (0..10).map(|i| (alloc::format!("a{i}"), 10)).collect();
        let model = NgramModel::from_counts(
            "x",
            range(2, 2),
            2.15,
            entries.iter().map(|(g, c)| (g.as_str(), *c)),
        )
        .unwrap();
        assert_eq!(model.total(2), 100);
        // 2.15 * ln(100) = 2.15 * 4.605170185988092
        assert!((model.penalty(2) - 9.901115899874398).abs() < 1e-12);
    }

    #[test]
    fn empty_length_borrows_penalty() {
        let model = NgramModel::from_counts("x", range(2, 4), 1.0, [(" a", 3), ("ab", 1)]).unwrap();
        assert_eq!(model.total(3), 0);
        assert_eq!(model.penalty(3), model.penalty(2));
        assert_eq!(model.penalty(4), model.penalty(2));
        let model = NgramModel::from_counts("x", range(2, 3), 1.0, [("abc", 2)]).unwrap();
        assert_eq!(model.penalty(2), model.penalty(3));
    }

    #[test]
    fn from_counts_rejects_bad_entries() {
        assert!(NgramModel::from_counts("x", range(2, 2), 1.0, [("abc", 1)]).is_err());
        assert!(NgramModel::from_counts("x", range(2, 2), 1.0, [("ab", 0)]).is_err());
        assert_eq!(
            NgramModel::from_counts("x", range(2, 2), 1.0, []),
            Err(Error::EmptyLanguage("x".into()))
        );
        assert!(NgramModel::empty("x", range(2, 2), 0.0).is_err());
    }

    #[test]
    fn language_without_words_is_an_error() {
        let corpus = Corpus::from_labeled(vec![("abc", "A"), ("123 !!", "B")]);
        assert_eq!(
            ModelSet::build(&corpus, range(1, 3), 1.0, FeatureConfig::default()),
            Err(Error::EmptyLanguage("B".into()))
        );
    }

    #[test]
    fn add_document_counts_and_unknown_language() {
        let corpus = Corpus::from_labeled(vec![("ab", "A"), ("cd", "B")]);
        let mut set = ModelSet::build(&corpus, range(2, 2), 1.0, FeatureConfig::default()).unwrap();
        let before_b = set.model("B").unwrap().clone();
        set.add_document(&Document::new(9, "ab ab xab", None), "A")
            .unwrap();
        assert_eq!(set.model("A").unwrap().count(2, "ab"), 4);
        assert_eq!(set.model("B").unwrap(), &before_b);
        let snapshot = set.clone();
        set.add_document(&Document::new(10, "", None), "A").unwrap();
        assert_eq!(set, snapshot);
        assert_eq!(
            set.add_document(&Document::new(11, "ab", None), "C"),
            Err(Error::UnknownLanguage("C".into()))
        );
    }

    #[test]
    fn changing_pm_matches_rebuild() {
        let corpus = Corpus::from_labeled(vec![("abc de", "A"), ("fgh", "B")]);
        let r = range(1, 3);
        let built = ModelSet::build(&corpus, r, 1.5, FeatureConfig::default()).unwrap();
        let direct = ModelSet::build(&corpus, r, 2.25, FeatureConfig::default()).unwrap();
        assert_eq!(built.with_penalty_modifier(2.25).unwrap(), direct);
    }

    #[test]
    fn gram_count_formula() {
        assert_eq!(gram_count(2, 2), 3);
        assert_eq!(gram_count(1, 5), 0);
        assert_eq!(gram_count(1, 3), 1);
    }
}
