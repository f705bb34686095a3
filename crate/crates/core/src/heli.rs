//! Word-level backoff identifier over words and character n-grams in their
//! original and lowercased forms.
//!
//! Each word is scored in the first domain that knows it, trying in order
//! original-case words, lowercased words, original-case grams and lowercased
//! grams (each only when enabled). Inside a gram domain the word starts at
//! length `min(max, |word| + 2)` and backs off to shorter lengths until at
//! least one of its grams is known to some language. At that length the
//! word's value is the mean over its grams; a gram unknown to every language
//! is replaced by its prefix one character shorter, down to the range
//! minimum, and dropped if still unknown. A document scores the mean of its
//! word scores, lower is better.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;

use crate::adaptation::Identifier;
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::ngram::{check_pm, fill_penalties, visit_word_ngrams, NgramRange};
use crate::scorers::{Polarity, Prediction};
use crate::text::normalize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeliPenalty {
    /// `pm * ln(total)` of the sub-model, the same rule as Naive Bayes.
    Totals,
    /// `pm * value` for every sub-model.
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeliConfig {
    /// Lowercased gram lengths.
    pub lnr: Option<NgramRange>,
    /// Original-case gram lengths.
    pub onr: Option<NgramRange>,
    /// Lowercased words.
    pub lw: bool,
    /// Original-case words.
    pub ow: bool,
    pub pm: f64,
    pub penalty: HeliPenalty,
}

impl HeliConfig {
    pub fn validate(&self) -> Result<()> {
        check_pm(self.pm)?;
        if let HeliPenalty::Constant(c) = self.penalty {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidPenaltyModifier(c));
            }
        }
        if self.lnr.is_none() && self.onr.is_none() && !self.lw && !self.ow {
            return Err(Error::NoHeliDomain);
        }
        Ok(())
    }

    /// Enabled domains in scoring order.
    pub fn domains(&self) -> Vec<Domain> {
        let mut out = Vec::with_capacity(4);
        if self.ow {
            out.push(Domain::WordOriginal);
        }
        if self.lw {
            out.push(Domain::WordLower);
        }
        if self.onr.is_some() {
            out.push(Domain::GramOriginal);
        }
        if self.lnr.is_some() {
            out.push(Domain::GramLower);
        }
        out
    }

    pub fn range(&self, domain: Domain) -> Option<NgramRange> {
        match domain {
            Domain::GramOriginal => self.onr,
            Domain::GramLower => self.lnr,
            Domain::WordOriginal | Domain::WordLower => None,
        }
    }
}

impl Default for HeliConfig {
    fn default() -> Self {
        let r = NgramRange::new(2, 6).expect("valid range");
        Self {
            lnr: Some(r),
            onr: Some(r),
            lw: true,
            ow: true,
            pm: 1.11,
            penalty: HeliPenalty::Totals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    WordOriginal,
    WordLower,
    GramOriginal,
    GramLower,
}

impl Domain {
    pub const ALL: [Domain; 4] = [
        Domain::WordOriginal,
        Domain::WordLower,
        Domain::GramOriginal,
        Domain::GramLower,
    ];

    pub fn kind(self) -> &'static str {
        match self {
            Domain::WordOriginal => "wordO",
            Domain::WordLower => "wordL",
            Domain::GramOriginal => "gramO",
            Domain::GramLower => "gramL",
        }
    }

    pub fn is_word(self) -> bool {
        matches!(self, Domain::WordOriginal | Domain::WordLower)
    }

    pub fn lowercase(self) -> bool {
        matches!(self, Domain::WordLower | Domain::GramLower)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Domain::ALL
            .into_iter()
            .find(|d| d.kind() == s)
            .ok_or_else(|| Error::InvalidEntry {
                gram: s.into(),
                reason: "unknown sub-model kind",
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Table {
    counts: HashMap<String, u64>,
    total: u64,
    penalty: f64,
}

impl Table {
    fn add(&mut self, item: &str, count: u64) {
        match self.counts.get_mut(item) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(String::from(item), count);
            }
        }
        self.total += count;
    }

    #[inline]
    fn count(&self, item: &str) -> u64 {
        self.counts.get(item).copied().unwrap_or(0)
    }

    #[inline]
    fn value(&self, item: &str) -> f64 {
        match self.count(item) {
            0 => self.penalty,
            c => -libm::log(c as f64 / self.total as f64),
        }
    }
}

/// All sub-models of one language. Gram tables are indexed by
/// `length - range.min`.
#[derive(Debug, Clone, PartialEq)]
struct LanguageModel {
    language: String,
    words: [Table; 2],
    grams: [Vec<Table>; 2],
}

// index into the [original, lower] pairs
fn casing(domain: Domain) -> usize {
    domain.lowercase() as usize
}

impl LanguageModel {
    fn new(language: &str, config: &HeliConfig) -> Self {
        let tables =
            |r: Option<NgramRange>| r.map_or_else(Vec::new, |r| vec![Table::default(); r.width()]);
        Self {
            language: language.into(),
            words: [Table::default(), Table::default()],
            grams: [tables(config.onr), tables(config.lnr)],
        }
    }

    fn add_text(&mut self, text: &str, config: &HeliConfig) {
        let norm = normalize(text);
        for (original, lower) in norm.words.iter().zip(&norm.lowercased) {
            for domain in config.domains() {
                let word = if domain.lowercase() { lower } else { original };
                self.add_item(domain, config, word, 1);
            }
        }
    }

    fn add_item(&mut self, domain: Domain, config: &HeliConfig, word: &str, count: u64) {
        let side = casing(domain);
        match config.range(domain) {
            None => self.words[side].add(word, count),
            Some(range) => {
                let tables = &mut self.grams[side];
                visit_word_ngrams(word, range, true, &mut |n, g| {
                    tables[n - range.min()].add(g, count)
                });
            }
        }
    }

    fn refresh(&mut self, config: &HeliConfig) -> Result<()> {
        let modifier = |total: u64| match config.penalty {
            HeliPenalty::Totals => config.pm * libm::log(total as f64),
            HeliPenalty::Constant(c) => config.pm * c,
        };
        for domain in config.domains() {
            let side = casing(domain);
            if domain.is_word() {
                let table = &mut self.words[side];
                if table.total == 0 {
                    return Err(Error::EmptyLanguage(self.language.clone()));
                }
                table.penalty = modifier(table.total);
            } else {
                let tables = &mut self.grams[side];
                let totals: Vec<u64> = tables.iter().map(|t| t.total).collect();
                if totals.iter().all(|&t| t == 0) {
                    return Err(Error::EmptyLanguage(self.language.clone()));
                }
                match config.penalty {
                    HeliPenalty::Totals => {
                        let mut penalties = vec![0.0; totals.len()];
                        fill_penalties(&totals, config.pm, &mut penalties);
                        for (t, p) in tables.iter_mut().zip(penalties) {
                            t.penalty = p;
                        }
                    }
                    HeliPenalty::Constant(_) => {
                        tables.iter_mut().for_each(|t| t.penalty = modifier(1))
                    }
                }
            }
        }
        Ok(())
    }
}

type Row<'a> = (&'a str, Domain, usize, &'a str, u64);

fn push_rows<'a>(
    rows: &mut Vec<Row<'a>>,
    language: &'a str,
    domain: Domain,
    length: usize,
    table: &'a Table,
) {
    let mut items: Vec<(&str, u64)> = table.counts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    items.sort_unstable();
    rows.extend(
        items
            .into_iter()
            .map(|(item, count)| (language, domain, length, item, count)),
    );
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeliModelSet {
    config: HeliConfig,
    models: Vec<LanguageModel>,
}

impl HeliModelSet {
    pub fn build(train: &Corpus, config: HeliConfig) -> Result<Self> {
        config.validate()?;
        let groups = train.by_label()?;
        let mut models = Vec::with_capacity(groups.len());
        for (label, docs) in groups {
            let mut model = LanguageModel::new(label, &config);
            for doc in docs {
                model.add_text(&doc.text, &config);
            }
            model.refresh(&config)?;
            models.push(model);
        }
        if models.is_empty() {
            return Err(Error::NoLanguages);
        }
        Ok(Self { config, models })
    }

    /// Rebuilds a model set from `(language, domain, item, count)` rows.
    /// Gram lengths are implied by the item's character count.
    pub fn from_rows<'a, I>(config: HeliConfig, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Domain, &'a str, u64)>,
    {
        config.validate()?;
        let enabled = config.domains();
        let mut models: Vec<LanguageModel> = Vec::new();
        for (language, domain, item, count) in rows {
            let bad = |reason| Error::InvalidEntry {
                gram: item.into(),
                reason,
            };
            if !enabled.contains(&domain) {
                return Err(bad("sub-model kind not enabled in the configuration"));
            }
            if count == 0 {
                return Err(bad("count must be at least 1"));
            }
            let index = match models.iter().position(|m| m.language == language) {
                Some(i) => i,
                None => {
                    models.push(LanguageModel::new(language, &config));
                    models.len() - 1
                }
            };
            let model = &mut models[index];
            let side = casing(domain);
            match config.range(domain) {
                None => model.words[side].add(item, count),
                Some(range) => {
                    let n = item.chars().count();
                    if !range.contains(n) {
                        return Err(bad("length outside model range"));
                    }
                    model.grams[side][n - range.min()].add(item, count);
                }
            }
        }
        if models.is_empty() {
            return Err(Error::NoLanguages);
        }
        for model in &mut models {
            model.refresh(&config)?;
        }
        models.sort_by(|a, b| a.language.cmp(&b.language));
        Ok(Self { config, models })
    }

    pub fn config(&self) -> &HeliConfig {
        &self.config
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

    /// Count of `item` in one sub-model of `language`.
    pub fn count(&self, language: &str, domain: Domain, item: &str) -> u64 {
        let Some(model) = self.index_of(language).map(|i| &self.models[i]) else {
            return 0;
        };
        let side = casing(domain);
        match self.config.range(domain) {
            None => model.words[side].count(item),
            Some(range) => {
                let n = item.chars().count();
                if range.contains(n) {
                    model.grams[side][n - range.min()].count(item)
                } else {
                    0
                }
            }
        }
    }

    /// Total token count of a sub-model; `length` is ignored for word domains.
    pub fn total(&self, language: &str, domain: Domain, length: usize) -> u64 {
        self.table(language, domain, length).map_or(0, |t| t.total)
    }

    pub fn penalty(&self, language: &str, domain: Domain, length: usize) -> Option<f64> {
        self.table(language, domain, length).map(|t| t.penalty)
    }

    fn table(&self, language: &str, domain: Domain, length: usize) -> Option<&Table> {
        let model = &self.models[self.index_of(language)?];
        let side = casing(domain);
        match self.config.range(domain) {
            None if self.config.domains().contains(&domain) => Some(&model.words[side]),
            None => None,
            Some(range) if range.contains(length) => Some(&model.grams[side][length - range.min()]),
            Some(_) => None,
        }
    }

    /// Every row as `(language, domain, length, item, count)`, sorted by
    /// language, domain kind, length and item. Word rows have length 0.
    pub fn rows(&self) -> Vec<Row<'_>> {
        let mut rows = Vec::new();
        let mut domains = self.config.domains();
        domains.sort_by_key(|d| d.kind());
        for model in &self.models {
            for &domain in &domains {
                let side = casing(domain);
                match self.config.range(domain) {
                    None => push_rows(&mut rows, &model.language, domain, 0, &model.words[side]),
                    Some(range) => {
                        for (offset, table) in model.grams[side].iter().enumerate() {
                            push_rows(
                                &mut rows,
                                &model.language,
                                domain,
                                range.min() + offset,
                                table,
                            );
                        }
                    }
                }
            }
        }
        rows
    }

    pub fn add_document(&mut self, doc: &Document, language: &str) -> Result<()> {
        let index = self
            .index_of(language)
            .ok_or_else(|| Error::UnknownLanguage(language.into()))?;
        self.add_text(&doc.text, index);
        Ok(())
    }

    fn add_text(&mut self, text: &str, index: usize) {
        if normalize(text).is_empty() {
            return;
        }
        let config = self.config;
        let model = &mut self.models[index];
        model.add_text(text, &config);
        // cannot fail: the model was already populated
        let _ = model.refresh(&config);
    }

    /// Per-language value of one word, in language order.
    pub fn score_word(&self, original: &str, lowercased: &str, out: &mut [f64]) {
        let domains = self.config.domains();
        for &domain in &domains {
            let word = if domain.lowercase() {
                lowercased
            } else {
                original
            };
            let side = casing(domain);
            match self.config.range(domain) {
                None => {
                    if self.models.iter().any(|m| m.words[side].count(word) > 0) {
                        for (slot, model) in out.iter_mut().zip(&self.models) {
                            *slot = model.words[side].value(word);
                        }
                        return;
                    }
                }
                Some(range) => {
                    if self.score_grams(word, side, range, out) {
                        return;
                    }
                }
            }
        }
        // nothing known anywhere: penalty of the last domain tried
        let last = *domains.last().expect("validated config has a domain");
        let side = casing(last);
        for (slot, model) in out.iter_mut().zip(&self.models) {
            *slot = match self.config.range(last) {
                None => model.words[side].penalty,
                Some(_) => model.grams[side][0].penalty,
            };
        }
    }

    fn known(&self, side: usize, offset: usize, gram: &str) -> bool {
        self.models
            .iter()
            .any(|m| m.grams[side][offset].count(gram) > 0)
    }

    fn score_grams(&self, word: &str, side: usize, range: NgramRange, out: &mut [f64]) -> bool {
        let mut padded = String::with_capacity(word.len() + 2);
        padded.push(' ');
        padded.push_str(word);
        padded.push(' ');
        let mut bounds: Vec<usize> = padded.char_indices().map(|(i, _)| i).collect();
        bounds.push(padded.len());
        let chars = bounds.len() - 1;
        if range.min() > chars {
            return false;
        }
        let start = range.max().min(chars);
        for n in (range.min()..=start).rev() {
            let positions = chars - n + 1;
            let gram_at = |pos: usize, len: usize| &padded[bounds[pos]..bounds[pos + len]];
            if !(0..positions).any(|p| self.known(side, n - range.min(), gram_at(p, n))) {
                continue;
            }
            out.iter_mut().for_each(|s| *s = 0.0);
            let mut used = 0usize;
            for pos in 0..positions {
                let mut len = n;
                loop {
                    let gram = gram_at(pos, len);
                    let offset = len - range.min();
                    if self.known(side, offset, gram) {
                        for (slot, model) in out.iter_mut().zip(&self.models) {
                            *slot += model.grams[side][offset].value(gram);
                        }
                        used += 1;
                        break;
                    }
                    if len == range.min() {
                        break;
                    }
                    len -= 1;
                }
            }
            let used = used as f64;
            out.iter_mut().for_each(|s| *s /= used);
            return true;
        }
        false
    }

    /// Mean word score per language, in language order. A text without
    /// words scores zero everywhere.
    pub fn score_text(&self, text: &str, out: &mut [f64]) {
        out.iter_mut().for_each(|s| *s = 0.0);
        let norm = normalize(text);
        if norm.is_empty() {
            return;
        }
        // canonical order: the sum must not depend on word order
        let mut words: Vec<(&String, &String)> = norm.words.iter().zip(&norm.lowercased).collect();
        words.sort_unstable();
        let mut word_scores = vec![0.0; self.models.len()];
        for (original, lower) in words {
            self.score_word(original, lower, &mut word_scores);
            for (total, v) in out.iter_mut().zip(&word_scores) {
                *total += v;
            }
        }
        let words = norm.len() as f64;
        out.iter_mut().for_each(|s| *s /= words);
    }

    pub fn classify(&self, doc: &Document) -> Prediction {
        self.predict(doc)
    }
}

impl Identifier for HeliModelSet {
    fn language_count(&self) -> usize {
        self.models.len()
    }

    fn language(&self, index: usize) -> &str {
        &self.models[index].language
    }

    fn polarity(&self) -> Polarity {
        Polarity::LowerIsBetter
    }

    fn score(&self, text: &str, scores: &mut [f64]) {
        self.score_text(text, scores);
    }

    fn adopt(&mut self, text: &str, language: usize) {
        self.add_text(text, language);
    }
}
