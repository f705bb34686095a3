//! Per-class precision, recall and F1 with macro and micro averages.
//!
//! Undefined ratios count as zero. The macro average runs over the classes
//! present in the gold labels; a class that is only ever predicted shows up
//! in the confusion matrix but gets no row of its own. In this single-label
//! setting micro F1 equals accuracy.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scorers::Prediction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold documents of this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `(gold, predicted) -> count`
    pub confusion: BTreeMap<(String, String), usize>,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub n: usize,
}

impl EvalReport {
    /// Every label that occurs as gold or as a prediction.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self
            .confusion
            .keys()
            .flat_map(|(g, p)| [g, p])
            .chain(self.per_class.keys())
            .collect();
        set.into_iter().cloned().collect()
    }

    pub fn cell(&self, gold: &str, predicted: &str) -> usize {
        self.confusion
            .get(&(String::from(gold), String::from(predicted)))
            .copied()
            .unwrap_or(0)
    }

    pub fn accuracy(&self) -> f64 {
        let correct: usize = self
            .confusion
            .iter()
            .filter(|((g, p), _)| g == p)
            .map(|(_, c)| c)
            .sum();
        ratio(correct, self.n)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Scores `(doc_id, predicted_label)` pairs against `gold`. Pairs must line
/// up one-to-one with the gold documents, in order.
pub fn evaluate<'a, I>(predictions: I, gold: &Corpus) -> Result<EvalReport>
where
    I: IntoIterator<Item = (usize, &'a str)>,
{
    let mut confusion: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut docs = gold.docs.iter();
    let mut n = 0;
    for (id, predicted) in predictions {
        let doc = docs.next().ok_or(Error::LengthMismatch {
            predictions: n + 1,
            gold: gold.len(),
        })?;
        if doc.id != id {
            return Err(Error::IdMismatch {
                expected: doc.id,
                found: id,
            });
        }
        let label = doc.label.as_deref().ok_or(Error::MissingLabel(doc.id))?;
        *confusion
            .entry((String::from(label), String::from(predicted)))
            .or_insert(0) += 1;
        n += 1;
    }
    if n != gold.len() {
        return Err(Error::LengthMismatch {
            predictions: n,
            gold: gold.len(),
        });
    }

    let mut per_class = BTreeMap::new();
    for class in gold.label_set() {
        let tp = confusion
            .get(&(class.clone(), class.clone()))
            .copied()
            .unwrap_or(0);
        let predicted: usize = confusion
            .iter()
            .filter(|((_, p), _)| *p == class)
            .map(|(_, c)| c)
            .sum();
        let support: usize = confusion
            .iter()
            .filter(|((g, _), _)| *g == class)
            .map(|(_, c)| c)
            .sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        per_class.insert(
            class,
            ClassMetrics {
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
            },
        );
    }
    let macro_f1 = if per_class.is_empty() {
        0.0
    } else {
        // sorted so the sum does not depend on label names
        let mut f1s: Vec<f64> = per_class.values().map(|m| m.f1).collect();
        f1s.sort_by(f64::total_cmp);
        f1s.iter().sum::<f64>() / per_class.len() as f64
    };
    let mut report = EvalReport {
        confusion,
        per_class,
        macro_f1,
        micro_f1: 0.0,
        n,
    };
    report.micro_f1 = report.accuracy();
    Ok(report)
}

/// [`evaluate`] over full predictions.
pub fn evaluate_predictions(predictions: &[Prediction], gold: &Corpus) -> Result<EvalReport> {
    evaluate(
        predictions.iter().map(|p| (p.doc_id, p.best.as_str())),
        gold,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gold(labels: &[&str]) -> Corpus {
        Corpus::from_labeled(labels.iter().map(|l| ("x", *l)))
    }

    fn run(g: &[&str], p: &[&str]) -> EvalReport {
        evaluate(p.iter().copied().enumerate(), &gold(g)).unwrap()
    }

    #[test]
    fn perfect() {
        let r = run(&["A", "B", "C"], &["A", "B", "C"]);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.micro_f1, 1.0);
    }

    #[test]
    fn hand_counted_two_class() {
        let r = run(&["A", "A", "B", "B"], &["A", "B", "B", "B"]);
        let a = r.per_class["A"];
        let b = r.per_class["B"];
        assert_eq!((a.precision, a.recall), (1.0, 0.5));
        assert!((a.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((b.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.recall, 1.0);
        assert!((b.f1 - 0.8).abs() < 1e-15);
        assert!((r.macro_f1 - 11.0 / 15.0).abs() < 1e-15);
        assert_eq!(r.micro_f1, 0.75);
        assert_eq!(r.cell("A", "B"), 1);
    }

    #[test]
    fn never_predicted_class_counts_as_zero() {
        let r = run(&["A", "B", "C"], &["A", "B", "B"]);
        assert_eq!(r.per_class["C"].f1, 0.0);
        assert!((r.macro_f1 - (1.0 + 2.0 / 3.0 + 0.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn predicted_only_class_has_no_row() {
        let r = run(&["A", "A"], &["A", "Z"]);
        assert_eq!(r.per_class.len(), 1);
        assert_eq!(r.per_class["A"].precision, 1.0);
        assert_eq!(r.labels(), vec![String::from("A"), String::from("Z")]);
        assert_eq!(r.micro_f1, 0.5);
    }

    #[test]
    fn misaligned_ids_and_lengths() {
        let g = gold(&["A", "B"]);
        assert_eq!(
            evaluate([(1, "A"), (0, "B")], &g),
            Err(Error::IdMismatch {
                expected: 0,
                found: 1
            })
        );
        assert!(matches!(
            evaluate([(0, "A")], &g),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            evaluate([(0, "A"), (1, "B"), (2, "A")], &g),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
