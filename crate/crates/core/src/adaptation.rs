//! Split-ordered adaptation of the language models to the texts being
//! identified.
//!
//! One epoch repeatedly classifies every unresolved text, orders them by
//! confidence margin, resolves the most confident split and folds the texts
//! of that split into the model of their predicted language. The split size
//! is recomputed each round so that the remaining texts fill the remaining
//! splits evenly, the last split taking the remainder.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::scorers::{Polarity, Prediction};

/// Something that scores texts per language and can absorb new texts into
/// its models. Languages are indexed `0..language_count()` in sorted code
/// order.
pub trait Identifier {
    fn language_count(&self) -> usize;

    fn language(&self, index: usize) -> &str;

    fn polarity(&self) -> Polarity;

    /// Writes one score per language into `scores`.
    fn score(&self, text: &str, scores: &mut [f64]);

    /// Score of one language, when it does not depend on the other
    /// languages' models. Must be bit-identical to the matching entry of
    /// [`Identifier::score`].
    fn score_language(&self, _text: &str, _language: usize) -> Option<f64> {
        None
    }

    fn adopt(&mut self, text: &str, language: usize);

    fn predict(&self, doc: &Document) -> Prediction {
        let mut scores = vec![0.0; self.language_count()];
        self.score(&doc.text, &mut scores);
        self.prediction(doc.id, &scores)
    }

    fn prediction(&self, doc_id: usize, scores: &[f64]) -> Prediction {
        Prediction::from_scores(
            doc_id,
            (0..self.language_count()).map(|i| self.language(i)),
            scores,
            self.polarity(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splits {
    Count(usize),
    /// One text per split.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptConfig {
    pub splits: Splits,
    /// Texts whose margin is at or below the threshold are never adopted.
    pub threshold: Option<f64>,
    pub epochs: usize,
    /// Re-score only the languages whose models changed in the previous
    /// round. Only used when the identifier supports per-language scoring;
    /// results are identical either way.
    pub incremental: bool,
}

impl AdaptConfig {
    pub fn disabled() -> Self {
        Self {
            splits: Splits::Count(1),
            threshold: None,
            epochs: 0,
            incremental: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.splits == Splits::Count(0) {
            return Err(Error::InvalidSplits);
        }
        if let Some(ct) = self.threshold {
            if ct.is_nan() || ct < 0.0 {
                return Err(Error::InvalidThreshold(ct));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based round counter, continuing across epochs.
    pub iteration: usize,
    pub doc_id: usize,
    pub predicted: String,
    pub margin: f64,
    pub adopted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptOutcome {
    /// One prediction per input text, in input order.
    pub predictions: Vec<Prediction>,
    pub trace: Vec<TraceRow>,
}

/// Identifies every text of `test`, adapting `identifier` along the way.
/// With `epochs == 0` this is plain batch classification.
pub fn adaptive_identify<I: Identifier>(
    test: &Corpus,
    identifier: &mut I,
    config: &AdaptConfig,
) -> Result<AdaptOutcome> {
    config.validate()?;
    if identifier.language_count() == 0 {
        return Err(Error::NoLanguages);
    }
    let docs = &test.docs;
    if config.epochs == 0 || docs.is_empty() {
        return Ok(AdaptOutcome {
            predictions: docs.iter().map(|d| identifier.predict(d)).collect(),
            trace: Vec::new(),
        });
    }

    let n = docs.len();
    let k = match config.splits {
        Splits::Full => n,
        Splits::Count(k) => k.min(n),
    };
    let languages = identifier.language_count();
    let mut finals: Vec<Option<Prediction>> = vec![None; n];
    let mut trace = Vec::with_capacity(n * config.epochs);
    let mut iteration = 0;

    for _ in 0..config.epochs {
        // positions into `docs`
        let mut unresolved: Vec<usize> = (0..n).collect();
        let mut scores: Vec<Vec<f64>> = vec![vec![0.0; languages]; n];
        let mut changed: Option<Vec<usize>> = None;
        let mut splits_left = k;

        while !unresolved.is_empty() {
            iteration += 1;
            rescore(
                identifier,
                docs,
                &unresolved,
                &mut scores,
                changed.as_deref(),
                config.incremental,
            );

            let mut round: Vec<(usize, Prediction)> = unresolved
                .iter()
                .map(|&pos| (pos, identifier.prediction(docs[pos].id, &scores[pos])))
                .collect();
            round.sort_by(|(pa, a), (pb, b)| {
                b.margin
                    .partial_cmp(&a.margin)
                    .unwrap_or(Ordering::Equal)
                    .then(docs[*pa].id.cmp(&docs[*pb].id))
            });

            let take = if splits_left <= 1 {
                round.len()
            } else {
                round.len() / splits_left
            };
            let rest = round.split_off(take);

            let mut adopted_langs = Vec::new();
            for (pos, prediction) in round {
                let adopt = config.threshold.is_none_or(|ct| prediction.margin > ct);
                trace.push(TraceRow {
                    iteration,
                    doc_id: prediction.doc_id,
                    predicted: prediction.best.clone(),
                    margin: prediction.margin,
                    adopted: adopt,
                });
                if adopt {
                    let lang = (0..languages)
                        .find(|&i| identifier.language(i) == prediction.best)
                        .expect("prediction names a model language");
                    identifier.adopt(&docs[pos].text, lang);
                    if !adopted_langs.contains(&lang) {
                        adopted_langs.push(lang);
                    }
                }
                finals[pos] = Some(prediction);
            }

            let mut next: Vec<usize> = rest.into_iter().map(|(pos, _)| pos).collect();
            next.sort_unstable();
            unresolved = next;
            adopted_langs.sort_unstable();
            changed = Some(adopted_langs);
            splits_left = splits_left.saturating_sub(1);
        }
    }

    Ok(AdaptOutcome {
        predictions: finals
            .into_iter()
            .map(|p| p.expect("every text resolved"))
            .collect(),
        trace,
    })
}

fn rescore<I: Identifier>(
    identifier: &I,
    docs: &[Document],
    unresolved: &[usize],
    scores: &mut [Vec<f64>],
    changed: Option<&[usize]>,
    incremental: bool,
) {
    match changed {
        Some(langs) if incremental && supports_partial(identifier, docs, unresolved) => {
            for &pos in unresolved {
                for &lang in langs {
                    scores[pos][lang] = identifier
                        .score_language(&docs[pos].text, lang)
                        .expect("per-language scoring");
                }
            }
        }
        _ => {
            for &pos in unresolved {
                identifier.score(&docs[pos].text, &mut scores[pos]);
            }
        }
    }
}

fn supports_partial<I: Identifier>(
    identifier: &I,
    docs: &[Document],
    unresolved: &[usize],
) -> bool {
    unresolved
        .first()
        .is_some_and(|&pos| identifier.score_language(&docs[pos].text, 0).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::{FeatureConfig, ModelSet, NgramRange};
    use crate::scorers::{Method, NgramClassifier};

    fn classifier() -> NgramClassifier {
        let train = Corpus::from_labeled(vec![
            ("romba nalla padam", "tam"),
            ("enna da idhu", "tam"),
            ("adipoli padam aanu", "mal"),
            ("entha ithu", "mal"),
        ]);
        let set = ModelSet::build(
            &train,
            NgramRange::new(2, 4).unwrap(),
            2.15,
            FeatureConfig::default(),
        )
        .unwrap();
        NgramClassifier::new(set, Method::NaiveBayes)
    }

    fn test_corpus() -> Corpus {
        Corpus::new(
            [
                "nalla padam da",
                "adipoli aanu",
                "enna ithu",
                "romba",
                "entha padam",
                "idhu",
            ]
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(i, *t, None))
            .collect(),
        )
    }

    fn config(splits: Splits, threshold: Option<f64>, epochs: usize) -> AdaptConfig {
        AdaptConfig {
            splits,
            threshold,
            epochs,
            incremental: false,
        }
    }

    #[test]
    fn zero_epochs_is_batch() {
        let mut c = classifier();
        let batch: Vec<_> = test_corpus().docs.iter().map(|d| c.predict(d)).collect();
        let out =
            adaptive_identify(&test_corpus(), &mut c, &config(Splits::Count(3), None, 0)).unwrap();
        assert_eq!(out.predictions, batch);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn split_sizes_leave_remainder_last() {
        let mut c = classifier();
        let out =
            adaptive_identify(&test_corpus(), &mut c, &config(Splits::Count(4), None, 1)).unwrap();
        let per_round: Vec<usize> = (1..=4)
            .map(|it| out.trace.iter().filter(|r| r.iteration == it).count())
            .collect();
        assert_eq!(per_round, vec![1, 1, 2, 2]);
    }

    #[test]
    fn too_many_splits_means_one_per_text() {
        let mut a = classifier();
        let mut b = classifier();
        let big = adaptive_identify(&test_corpus(), &mut a, &config(Splits::Count(100), None, 1))
            .unwrap();
        let full =
            adaptive_identify(&test_corpus(), &mut b, &config(Splits::Full, None, 1)).unwrap();
        assert_eq!(big, full);
        assert_eq!(full.trace.last().unwrap().iteration, 6);
    }

    #[test]
    fn infinite_threshold_adopts_nothing() {
        let mut c = classifier();
        let before = c.clone();
        let out = adaptive_identify(
            &test_corpus(),
            &mut c,
            &config(Splits::Count(2), Some(f64::INFINITY), 1),
        )
        .unwrap();
        assert_eq!(c, before);
        assert!(out.trace.iter().all(|r| !r.adopted));
        let batch: Vec<_> = test_corpus()
            .docs
            .iter()
            .map(|d| before.predict(d))
            .collect();
        assert_eq!(out.predictions, batch);
    }

    #[test]
    fn empty_test_and_bad_config() {
        let mut c = classifier();
        let out =
            adaptive_identify(&Corpus::default(), &mut c, &config(Splits::Full, None, 1)).unwrap();
        assert!(out.predictions.is_empty());
        assert_eq!(
            adaptive_identify(&test_corpus(), &mut c, &config(Splits::Count(0), None, 1)),
            Err(Error::InvalidSplits)
        );
        assert!(
            adaptive_identify(&test_corpus(), &mut c, &config(Splits::Full, Some(-1.0), 1))
                .is_err()
        );
    }

    #[test]
    fn incremental_matches_full_rescoring() {
        for splits in [Splits::Count(1), Splits::Count(3), Splits::Full] {
            let mut a = classifier();
            let mut b = classifier();
            let plain =
                adaptive_identify(&test_corpus(), &mut a, &config(splits, None, 2)).unwrap();
            let fast = adaptive_identify(
                &test_corpus(),
                &mut b,
                &AdaptConfig {
                    incremental: true,
                    ..config(splits, None, 2)
                },
            )
            .unwrap();
            assert_eq!(plain, fast);
            assert_eq!(a, b);
        }
    }
}
