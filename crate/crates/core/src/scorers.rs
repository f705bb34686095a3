//! Simple scoring, sum of relative frequencies and Naive Bayes over a
//! [`ModelSet`].
//!
//! Naive Bayes multiplies relative frequencies, computed as a sum of
//! negative natural logs so that lower is better. Grams missing from a
//! language cost that language's penalty for the gram length. The other two
//! methods are higher-is-better and ignore the penalty modifier.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use core::fmt;
use core::str::FromStr;

use crate::adaptation::Identifier;
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::ngram::{visit_ngrams, ModelSet, NgramModel};
use crate::text::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Simple,
    SumRelativeFrequencies,
    NaiveBayes,
}

impl Method {
    pub fn polarity(self) -> Polarity {
        match self {
            Method::Simple | Method::SumRelativeFrequencies => Polarity::HigherIsBetter,
            Method::NaiveBayes => Polarity::LowerIsBetter,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Simple => "simple",
            Method::SumRelativeFrequencies => "sumrf",
            Method::NaiveBayes => "nb",
        }
    }

    /// Contribution of one gram token to the language's score.
    #[inline]
    fn gram_value(self, model: &NgramModel, n: usize, gram: &str) -> f64 {
        let count = model.count(n, gram);
        match self {
            Method::Simple => (count > 0) as u8 as f64,
            Method::SumRelativeFrequencies => {
                if count == 0 {
                    0.0
                } else {
                    count as f64 / model.total(n) as f64
                }
            }
            Method::NaiveBayes => {
                if count == 0 {
                    model.penalty(n)
                } else {
                    -libm::log(count as f64 / model.total(n) as f64)
                }
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "simple" => Ok(Method::Simple),
            "sumrf" | "sum_rf" => Ok(Method::SumRelativeFrequencies),
            "nb" => Ok(Method::NaiveBayes),
            other => Err(alloc::format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    HigherIsBetter,
    LowerIsBetter,
}

impl Polarity {
    /// True when `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Polarity::HigherIsBetter => a > b,
            Polarity::LowerIsBetter => a < b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: usize,
    pub best: String,
    pub scores: BTreeMap<String, f64>,
    /// `|score(best) - score(second best)|`, zero on a tie or with a single
    /// language.
    pub margin: f64,
}

impl Prediction {
    /// Picks the best language under `polarity`. `languages` must be sorted,
    /// so the first of several equal scores is the lexicographically
    /// smallest code.
    pub fn from_scores<'a, I>(
        doc_id: usize,
        languages: I,
        scores: &[f64],
        polarity: Polarity,
    ) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let (best, margin) = rank_top2(scores, polarity);
        let mut best_code = String::new();
        let mut map = BTreeMap::new();
        for (i, lang) in languages.into_iter().enumerate() {
            if i == best {
                best_code = String::from(lang);
            }
            map.insert(String::from(lang), scores[i]);
        }
        Prediction {
            doc_id,
            best: best_code,
            scores: map,
            margin,
        }
    }
}

/// Index of the best score (first on ties) and the margin to the runner-up.
pub(crate) fn rank_top2(scores: &[f64], polarity: Polarity) -> (usize, f64) {
    let mut best = 0;
    for i in 1..scores.len() {
        if polarity.better(scores[i], scores[best]) {
            best = i;
        }
    }
    let mut second: Option<usize> = None;
    for i in 0..scores.len() {
        if i == best {
            continue;
        }
        match second {
            Some(s) if !polarity.better(scores[i], scores[s]) => {}
            _ => second = Some(i),
        }
    }
    let margin = second.map_or(0.0, |s| libm::fabs(scores[best] - scores[s]));
    (best, margin)
}

fn score_grams<S: AsRef<str>>(
    grams: &[S],
    model_set: &ModelSet,
    method: Method,
) -> BTreeMap<String, f64> {
    let range = model_set.range();
    model_set
        .models()
        .iter()
        .map(|model| {
            let mut score = 0.0;
            for gram in grams {
                let gram = gram.as_ref();
                let n = gram.chars().count();
                if range.contains(n) {
                    score += method.gram_value(model, n, gram);
                }
            }
            (String::from(model.language()), score)
        })
        .collect()
}

/// Number of gram tokens found in each language's model.
pub fn score_simple<S: AsRef<str>>(grams: &[S], model_set: &ModelSet) -> BTreeMap<String, f64> {
    score_grams(grams, model_set, Method::Simple)
}

/// Sum of the relative frequencies of the gram tokens.
pub fn score_sum_rf<S: AsRef<str>>(grams: &[S], model_set: &ModelSet) -> BTreeMap<String, f64> {
    score_grams(grams, model_set, Method::SumRelativeFrequencies)
}

/// Sum of negative log relative frequencies, penalties for missing grams.
pub fn score_nb<S: AsRef<str>>(grams: &[S], model_set: &ModelSet) -> BTreeMap<String, f64> {
    score_grams(grams, model_set, Method::NaiveBayes)
}

/// Scores `text` for every language of `model_set`, in language order.
pub fn score_text(text: &str, model_set: &ModelSet, method: Method, out: &mut [f64]) {
    out.iter_mut().for_each(|s| *s = 0.0);
    let norm = normalize(text);
    let models = model_set.models();
    visit_ngrams(&norm, model_set.range(), model_set.features(), |n, gram| {
        for (score, model) in out.iter_mut().zip(models) {
            *score += method.gram_value(model, n, gram);
        }
    });
}

/// Scores `text` for a single language. Bit-identical to the corresponding
/// entry of [`score_text`].
pub fn score_text_for(text: &str, model_set: &ModelSet, method: Method, language: usize) -> f64 {
    let norm = normalize(text);
    let model = &model_set.models()[language];
    let mut score = 0.0;
    visit_ngrams(&norm, model_set.range(), model_set.features(), |n, gram| {
        score += method.gram_value(model, n, gram);
    });
    score
}

pub fn classify(doc: &Document, model_set: &ModelSet, method: Method) -> Result<Prediction> {
    if model_set.is_empty() {
        return Err(Error::NoLanguages);
    }
    let mut scores = vec![0.0; model_set.len()];
    score_text(&doc.text, model_set, method, &mut scores);
    Ok(Prediction::from_scores(
        doc.id,
        model_set.languages(),
        &scores,
        method.polarity(),
    ))
}

/// A [`ModelSet`] paired with the method used to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramClassifier {
    pub models: ModelSet,
    pub method: Method,
}

impl NgramClassifier {
    pub fn new(models: ModelSet, method: Method) -> Self {
        Self { models, method }
    }

    pub fn classify(&self, doc: &Document) -> Prediction {
        self.predict(doc)
    }
}

impl Identifier for NgramClassifier {
    fn language_count(&self) -> usize {
        self.models.len()
    }

    fn language(&self, index: usize) -> &str {
        self.models.models()[index].language()
    }

    fn polarity(&self) -> Polarity {
        self.method.polarity()
    }

    fn score(&self, text: &str, scores: &mut [f64]) {
        score_text(text, &self.models, self.method, scores);
    }

    fn score_language(&self, text: &str, language: usize) -> Option<f64> {
        Some(score_text_for(text, &self.models, self.method, language))
    }

    fn adopt(&mut self, text: &str, language: usize) {
        self.models.add_text(text, language);
    }
}
