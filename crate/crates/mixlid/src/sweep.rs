//! Grid search over n-gram ranges and penalty modifiers.
//!
//! Every cell is trained on `train` and scored on `dev`. Cells run in
//! parallel on the current rayon pool; the output order only depends on the
//! results.

use std::cmp::Ordering;
use std::fmt::Write as _;

use mixlid_core::adaptation::AdaptOutcome;
use mixlid_core::eval::evaluate_predictions;
use mixlid_core::{
    adaptive_identify, AdaptConfig, Corpus, FeatureConfig, HeliConfig, HeliModelSet, HeliPenalty,
    Identifier, Method, ModelSet, NgramClassifier, NgramRange, MAX_NGRAM,
};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMethod {
    Ngram(Method),
    /// HeLI with the swept range used for every enabled gram domain.
    Heli {
        lowercase_grams: bool,
        original_grams: bool,
        lw: bool,
        ow: bool,
    },
}

impl SweepMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMethod::Ngram(m) => m.name(),
            SweepMethod::Heli { .. } => "heli",
        }
    }

    fn uses_pm(&self) -> bool {
        !matches!(
            self,
            SweepMethod::Ngram(Method::Simple | Method::SumRelativeFrequencies)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: &'static str,
    pub range: NgramRange,
    /// `None` for methods that ignore the penalty modifier.
    pub pm: Option<f64>,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

/// Parses a comma-separated list of ranges. Each item is `a-b`, a single
/// length `a`, or `all:a-b` for every sub-range of `a-b`.
pub fn parse_ranges(spec: &str) -> Result<Vec<NgramRange>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(span) = item.strip_prefix("all:") {
            let outer: NgramRange = span
                .parse()
                .map_err(|e| Error::Grid(format!("{item}: {e}")))?;
            for min in outer.lengths() {
                for max in min..=outer.max() {
                    out.push(NgramRange::new(min, max)?);
                }
            }
        } else {
            out.push(
                item.parse()
                    .map_err(|e| Error::Grid(format!("{item}: {e}")))?,
            );
        }
    }
    dedup_ranges(&mut out);
    if out.is_empty() {
        return Err(Error::Grid("no n-gram ranges".into()));
    }
    Ok(out)
}

fn dedup_ranges(ranges: &mut Vec<NgramRange>) {
    ranges.sort_by_key(|r| (r.min(), r.max()));
    ranges.dedup();
}

/// Parses a comma-separated list of penalty modifiers. Each item is a value
/// or `start:stop:step`, inclusive of both ends. Values are rounded to nine
/// decimals so that stepped grids print cleanly.
pub fn parse_pms(spec: &str) -> Result<Vec<f64>> {
    let round = |v: f64| (v * 1e9).round() / 1e9;
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Grid(format!("bad penalty modifier {s:?}")))
    };
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts[..] {
            [v] => out.push(number(v)?),
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(Error::Grid(format!("bad penalty modifier span {item:?}")));
                }
                let steps = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=steps).map(|i| round(start + i as f64 * step)));
            }
            _ => return Err(Error::Grid(format!("bad penalty modifier item {item:?}"))),
        }
    }
    if let Some(bad) = out.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Grid(format!(
            "penalty modifier must be positive, got {bad}"
        )));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn identify<I: Identifier>(
    dev: &Corpus,
    mut identifier: I,
    adapt: Option<&AdaptConfig>,
) -> Result<AdaptOutcome> {
    let config = adapt.copied().unwrap_or_else(AdaptConfig::disabled);
    Ok(adaptive_identify(dev, &mut identifier, &config)?)
}

fn score_cell(dev: &Corpus, outcome: &AdaptOutcome) -> Result<(f64, f64)> {
    let report = evaluate_predictions(&outcome.predictions, dev)?;
    Ok((report.macro_f1, report.micro_f1))
}

/// Evaluates every `(range, pm)` cell. Methods that ignore the penalty
/// modifier get one row per range.
pub fn sweep(
    train: &Corpus,
    dev: &Corpus,
    method: SweepMethod,
    ranges: &[NgramRange],
    pms: &[f64],
    adapt: Option<&AdaptConfig>,
    features: FeatureConfig,
) -> Result<Vec<SweepRow>> {
    if ranges.is_empty() || (method.uses_pm() && pms.is_empty()) {
        return Err(Error::Grid("empty grid".into()));
    }
    if let Some(r) = ranges.iter().find(|r| r.max() > MAX_NGRAM) {
        return Err(Error::Grid(format!("range {r} too long")));
    }
    let cell_pms: Vec<Option<f64>> = if method.uses_pm() {
        pms.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    let per_range: Vec<Vec<SweepRow>> = ranges
        .par_iter()
        .map(|&range| -> Result<Vec<SweepRow>> {
            match method {
                SweepMethod::Ngram(m) => {
                    let base = ModelSet::build(train, range, cell_pms[0].unwrap_or(1.0), features)?;
                    cell_pms
                        .par_iter()
                        .map(|&pm| {
                            let set = match pm {
                                Some(pm) => base.with_penalty_modifier(pm)?,
                                None => base.clone(),
                            };
                            let outcome = identify(dev, NgramClassifier::new(set, m), adapt)?;
                            let (macro_f1, micro_f1) = score_cell(dev, &outcome)?;
                            Ok(SweepRow {
                                method: method.name(),
                                range,
                                pm,
                                macro_f1,
                                micro_f1,
                            })
                        })
                        .collect()
                }
                SweepMethod::Heli {
                    lowercase_grams,
                    original_grams,
                    lw,
                    ow,
                } => cell_pms
                    .par_iter()
                    .map(|&pm| {
                        let pm = pm.expect("heli uses the penalty modifier");
                        let config = HeliConfig {
                            lnr: lowercase_grams.then_some(range),
                            onr: original_grams.then_some(range),
                            lw,
                            ow,
                            pm,
                            penalty: HeliPenalty::Totals,
                        };
                        let models = HeliModelSet::build(train, config)?;
                        let outcome = identify(dev, models, adapt)?;
                        let (macro_f1, micro_f1) = score_cell(dev, &outcome)?;
                        Ok(SweepRow {
                            method: method.name(),
                            range,
                            pm: Some(pm),
                            macro_f1,
                            micro_f1,
                        })
                    })
                    .collect(),
            }
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<SweepRow> = per_range.into_iter().flatten().collect();
    rows.sort_by(compare_rows);
    Ok(rows)
}

fn compare_rows(a: &SweepRow, b: &SweepRow) -> Ordering {
    b.macro_f1
        .total_cmp(&a.macro_f1)
        .then(a.range.min().cmp(&b.range.min()))
        .then(a.range.max().cmp(&b.range.max()))
        .then(a.pm.unwrap_or(0.0).total_cmp(&b.pm.unwrap_or(0.0)))
}

pub const SWEEP_HEADER: &str = "method\trange_min\trange_max\tpm\tmacro_f1\tmicro_f1";

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let pm = row.pm.map_or_else(|| "-".to_string(), |p| p.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            row.method,
            row.range.min(),
            row.range.max(),
            pm,
            row.macro_f1,
            row.micro_f1
        );
    }
    out
}
