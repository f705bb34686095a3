//! Brute-force reference scorers written directly from the model
//! definitions, sharing no code with the library, plus a generator of tiny
//! random corpora and a checker comparing the two.

#![allow(dead_code)]

use std::collections::HashMap;

use mixlid_core::{
    classify, Corpus, Document, FeatureConfig, HeliConfig, HeliModelSet, HeliPenalty, Method,
    ModelSet, NgramRange,
};

/// splitmix64
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

const CHARS: &[char] = &[
    'a', 'b', 'c', 'a', 'b', 'A', 'B', 'é', 'É', 'ß', ' ', ' ', ' ', '1', '!', '-',
];
const CODES: &[&str] = &["tam", "mal", "kan", "other", "eng", "hin"];
const PMS: &[f64] = &[0.5, 1.0, 1.11, 2.15, 3.7];

#[derive(Debug, Clone)]
pub struct Case {
    pub train: Vec<(String, String)>,
    pub test: Vec<String>,
    pub min: usize,
    pub max: usize,
    pub pm: f64,
    pub lw: bool,
    pub ow: bool,
}

fn random_text(rng: &mut Rng, max_len: usize) -> String {
    let len = rng.below(max_len + 1);
    (0..len).map(|_| *rng.pick(CHARS)).collect()
}

/// At most 5 languages, at most 20 documents, grams of length at most 3.
pub fn random_case(seed: u64) -> Case {
    let mut rng = Rng::new(seed);
    let mut codes: Vec<&str> = CODES.to_vec();
    for i in (1..codes.len()).rev() {
        codes.swap(i, rng.below(i + 1));
    }
    let languages = 1 + rng.below(5);
    let codes = &codes[..languages];
    let docs = languages + rng.below(20 - languages + 1);
    let mut train = Vec::with_capacity(docs);
    for i in 0..docs {
        let code = if i < languages {
            codes[i]
        } else {
            *rng.pick(codes)
        };
        train.push((random_text(&mut rng, 10), code.to_string()));
    }
    // every language needs at least one word
    for code in codes {
        let has_words = train.iter().any(|(t, c)| c == code && !words(t).is_empty());
        if !has_words {
            let word: String = (0..1 + rng.below(3))
                .map(|_| *rng.pick(&CHARS[..10]))
                .collect();
            train.push((word, code.to_string()));
        }
    }
    // interleave labels so grouping by label is exercised
    for i in (1..train.len()).rev() {
        train.swap(i, rng.below(i + 1));
    }
    let mut test: Vec<String> = (0..6).map(|_| random_text(&mut rng, 12)).collect();
    test.push(train[rng.below(train.len())].0.clone());
    let min = 1 + rng.below(3);
    let max = min + rng.below(3 - min + 1);
    Case {
        train,
        test,
        min,
        max,
        pm: *rng.pick(PMS),
        lw: rng.below(2) == 0,
        ow: rng.below(2) == 0,
    }
}

/// Maximal runs of alphabetic characters.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            current.push(c);
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// The logarithm the library uses, so mathematically tied scores tie in
/// both.
fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn lower(word: &str) -> String {
    word.to_lowercase()
}

/// Every window of `n` characters of the space-padded word.
pub fn windows(word: &str, n: usize) -> Vec<String> {
    let chars: Vec<char> = format!(" {word} ").chars().collect();
    if n > chars.len() {
        return Vec::new();
    }
    chars.windows(n).map(|w| w.iter().collect()).collect()
}

/// Index of the length whose total supplies the penalty for `i`: itself,
/// else the nearest shorter populated length, else the nearest longer one.
fn penalty_source(totals: &[u64], i: usize) -> Option<usize> {
    if totals[i] > 0 {
        return Some(i);
    }
    let mut j = i;
    while j > 0 {
        j -= 1;
        if totals[j] > 0 {
            return Some(j);
        }
    }
    (i + 1..totals.len()).find(|&j| totals[j] > 0)
}

fn penalty(totals: &[u64], i: usize, pm: f64) -> f64 {
    match penalty_source(totals, i) {
        Some(j) => pm * ln(totals[j] as f64),
        None => 0.0,
    }
}

/// Per-language gram counts keyed by (length, gram).
pub struct NgramOracle {
    pub languages: Vec<String>,
    counts: Vec<HashMap<(usize, String), u64>>,
    totals: Vec<Vec<u64>>,
    min: usize,
    max: usize,
    pm: f64,
}

impl NgramOracle {
    pub fn new(train: &[(String, String)], min: usize, max: usize, pm: f64) -> Self {
        let mut languages: Vec<String> = train.iter().map(|(_, l)| l.clone()).collect();
        languages.sort();
        languages.dedup();
        let mut counts = vec![HashMap::new(); languages.len()];
        let mut totals = vec![vec![0u64; max - min + 1]; languages.len()];
        for (text, label) in train {
            let l = languages.iter().position(|x| x == label).unwrap();
            for n in min..=max {
                for gram in Self::doc_grams(text, n) {
                    *counts[l].entry((n, gram)).or_insert(0) += 1;
                    totals[l][n - min] += 1;
                }
            }
        }
        NgramOracle {
            languages,
            counts,
            totals,
            min,
            max,
            pm,
        }
    }

    fn doc_grams(text: &str, n: usize) -> Vec<String> {
        words(text)
            .iter()
            .flat_map(|w| windows(&lower(w), n))
            .collect()
    }

    pub fn count(&self, l: usize, n: usize, gram: &str) -> u64 {
        self.counts[l]
            .get(&(n, gram.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, l: usize, n: usize) -> u64 {
        self.totals[l][n - self.min]
    }

    pub fn penalty(&self, l: usize, n: usize) -> f64 {
        penalty(&self.totals[l], n - self.min, self.pm)
    }

    /// Test grams in scoring order: word by word, then length, then position.
    pub fn test_grams(&self, text: &str) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        for w in words(text) {
            let w = lower(&w);
            for n in self.min..=self.max {
                out.extend(windows(&w, n).into_iter().map(|g| (n, g)));
            }
        }
        out
    }

    pub fn simple(&self, text: &str) -> Vec<f64> {
        let grams = self.test_grams(text);
        (0..self.languages.len())
            .map(|l| {
                grams
                    .iter()
                    .filter(|(n, g)| self.count(l, *n, g) > 0)
                    .count() as f64
            })
            .collect()
    }

    pub fn sum_rf(&self, text: &str) -> Vec<f64> {
        let grams = self.test_grams(text);
        (0..self.languages.len())
            .map(|l| {
                let mut s = 0.0;
                for (n, g) in &grams {
                    s += self.count(l, *n, g) as f64 / self.total(l, *n) as f64;
                }
                s
            })
            .collect()
    }

    pub fn naive_bayes(&self, text: &str) -> Vec<f64> {
        let grams = self.test_grams(text);
        (0..self.languages.len())
            .map(|l| {
                let mut s = 0.0;
                for (n, g) in &grams {
                    let c = self.count(l, *n, g);
                    s += if c > 0 {
                        -ln(c as f64 / self.total(l, *n) as f64)
                    } else {
                        self.penalty(l, *n)
                    };
                }
                s
            })
            .collect()
    }

    /// Product of relative frequencies, penalties mapped back to linear
    /// space as exp(-penalty).
    pub fn linear_likelihood(&self, text: &str) -> Vec<f64> {
        let grams = self.test_grams(text);
        (0..self.languages.len())
            .map(|l| {
                grams
                    .iter()
                    .map(|(n, g)| match self.count(l, *n, g) {
                        0 => (-self.penalty(l, *n)).exp(),
                        c => c as f64 / self.total(l, *n) as f64,
                    })
                    .product()
            })
            .collect()
    }
}

/// Language codes best first; ties go to the smaller code.
pub fn ranking(languages: &[String], scores: &[f64], lower_is_better: bool) -> Vec<String> {
    let mut order: Vec<usize> = (0..languages.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = if lower_is_better {
            scores[a].partial_cmp(&scores[b]).unwrap()
        } else {
            scores[b].partial_cmp(&scores[a]).unwrap()
        };
        by_score.then(languages[a].cmp(&languages[b]))
    });
    order.into_iter().map(|i| languages[i].clone()).collect()
}

#[derive(Clone, Copy)]
enum Side {
    Original,
    Lower,
}

/// Word and gram tables of every language, for both casings.
pub struct HeliOracle {
    pub languages: Vec<String>,
    // [language][side] -> word -> count
    words: Vec<[HashMap<String, u64>; 2]>,
    // [language][side] -> (n, gram) -> count
    grams: Vec<[HashMap<(usize, String), u64>; 2]>,
    gram_totals: Vec<[Vec<u64>; 2]>,
    min: usize,
    max: usize,
    pm: f64,
    lw: bool,
    ow: bool,
}

fn side_word(word: &str, side: Side) -> String {
    match side {
        Side::Original => word.to_string(),
        Side::Lower => lower(word),
    }
}

impl HeliOracle {
    /// Both gram domains use `min..=max`.
    pub fn new(
        train: &[(String, String)],
        min: usize,
        max: usize,
        pm: f64,
        lw: bool,
        ow: bool,
    ) -> Self {
        let mut languages: Vec<String> = train.iter().map(|(_, l)| l.clone()).collect();
        languages.sort();
        languages.dedup();
        let k = languages.len();
        let mut word_tables = vec![[HashMap::new(), HashMap::new()]; k];
        let mut gram_tables = vec![[HashMap::new(), HashMap::new()]; k];
        let mut gram_totals = vec![[vec![0u64; max - min + 1], vec![0u64; max - min + 1]]; k];
        for (text, label) in train {
            let l = languages.iter().position(|x| x == label).unwrap();
            for w in words(text) {
                for (s, side) in [Side::Original, Side::Lower].into_iter().enumerate() {
                    let w = side_word(&w, side);
                    *word_tables[l][s].entry(w.clone()).or_insert(0) += 1;
                    for n in min..=max {
                        for g in windows(&w, n) {
                            *gram_tables[l][s].entry((n, g)).or_insert(0) += 1;
                            gram_totals[l][s][n - min] += 1;
                        }
                    }
                }
            }
        }
        HeliOracle {
            languages,
            words: word_tables,
            grams: gram_tables,
            gram_totals,
            min,
            max,
            pm,
            lw,
            ow,
        }
    }

    fn word_value(&self, l: usize, s: usize, word: &str) -> f64 {
        let total: u64 = self.words[l][s].values().sum();
        match self.words[l][s].get(word) {
            Some(&c) => -ln(c as f64 / total as f64),
            None => self.pm * ln(total as f64),
        }
    }

    fn gram_count(&self, l: usize, s: usize, n: usize, gram: &str) -> u64 {
        self.grams[l][s]
            .get(&(n, gram.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn gram_value(&self, l: usize, s: usize, n: usize, gram: &str) -> f64 {
        match self.gram_count(l, s, n, gram) {
            0 => penalty(&self.gram_totals[l][s], n - self.min, self.pm),
            c => -ln(c as f64 / self.gram_totals[l][s][n - self.min] as f64),
        }
    }

    fn gram_known(&self, s: usize, n: usize, gram: &str) -> bool {
        (0..self.languages.len()).any(|l| self.gram_count(l, s, n, gram) > 0)
    }

    fn try_grams(&self, s: usize, word: &str) -> Option<Vec<f64>> {
        let padded: Vec<char> = format!(" {word} ").chars().collect();
        let start = self.max.min(padded.len());
        if self.min > start {
            return None;
        }
        let gram = |pos: usize, len: usize| padded[pos..pos + len].iter().collect::<String>();
        for n in (self.min..=start).rev() {
            let positions = padded.len() - n + 1;
            if !(0..positions).any(|p| self.gram_known(s, n, &gram(p, n))) {
                continue;
            }
            // each position contributes its longest known prefix, if any
            let mut chosen = Vec::new();
            for p in 0..positions {
                if let Some(len) = (self.min..=n)
                    .rev()
                    .find(|&len| self.gram_known(s, len, &gram(p, len)))
                {
                    chosen.push((len, gram(p, len)));
                }
            }
            let k = chosen.len() as f64;
            return Some(
                (0..self.languages.len())
                    .map(|l| {
                        let mut sum = 0.0;
                        for (len, g) in &chosen {
                            sum += self.gram_value(l, s, *len, g);
                        }
                        sum / k
                    })
                    .collect(),
            );
        }
        None
    }

    pub fn word_scores(&self, word: &str) -> Vec<f64> {
        let k = self.languages.len();
        // original words, lower words, original grams, lower grams
        if self.ow && (0..k).any(|l| self.words[l][0].contains_key(word)) {
            return (0..k).map(|l| self.word_value(l, 0, word)).collect();
        }
        let lw = lower(word);
        if self.lw && (0..k).any(|l| self.words[l][1].contains_key(&lw)) {
            return (0..k).map(|l| self.word_value(l, 1, &lw)).collect();
        }
        if let Some(v) = self.try_grams(0, word) {
            return v;
        }
        if let Some(v) = self.try_grams(1, &lw) {
            return v;
        }
        (0..k)
            .map(|l| penalty(&self.gram_totals[l][1], 0, self.pm))
            .collect()
    }

    pub fn score(&self, text: &str) -> Vec<f64> {
        let k = self.languages.len();
        let mut ws = words(text);
        if ws.is_empty() {
            return vec![0.0; k];
        }
        ws.sort_by(|a, b| (a, lower(a)).cmp(&(b, lower(b))));
        let mut sums = vec![0.0; k];
        for w in &ws {
            for (s, v) in sums.iter_mut().zip(self.word_scores(w)) {
                *s += v;
            }
        }
        sums.iter().map(|s| s / ws.len() as f64).collect()
    }
}

fn compare(
    what: &str,
    text: &str,
    languages: &[String],
    expected: &[f64],
    got: &std::collections::BTreeMap<String, f64>,
    lower_is_better: bool,
    best: &str,
) -> Result<(), String> {
    let got: Vec<f64> = languages.iter().map(|l| got[l]).collect();
    let want = ranking(languages, expected, lower_is_better);
    let have = ranking(languages, &got, lower_is_better);
    if want != have || want[0] != best {
        return Err(format!(
            "{what} on {text:?}: oracle ranking {want:?} ({expected:?}), library {have:?} ({got:?}), best {best}"
        ));
    }
    Ok(())
}

/// Compares the library against the oracles on every test text of `case`;
/// returns the number of rankings compared.
pub fn check_case(case: &Case) -> Result<usize, String> {
    let train = Corpus::from_labeled(case.train.iter().map(|(t, l)| (t.as_str(), l.as_str())));
    let range = NgramRange::new(case.min, case.max).map_err(|e| e.to_string())?;
    let set = ModelSet::build(&train, range, case.pm, FeatureConfig::default())
        .map_err(|e| e.to_string())?;
    let oracle = NgramOracle::new(&case.train, case.min, case.max, case.pm);
    if set.languages().collect::<Vec<_>>() != oracle.languages {
        return Err("language sets differ".into());
    }
    let mut compared = 0;
    for (i, text) in case.test.iter().enumerate() {
        let doc = Document::new(i, text.clone(), None);
        for (method, expected) in [
            (Method::Simple, oracle.simple(text)),
            (Method::SumRelativeFrequencies, oracle.sum_rf(text)),
            (Method::NaiveBayes, oracle.naive_bayes(text)),
        ] {
            let p = classify(&doc, &set, method).map_err(|e| e.to_string())?;
            let lower_is_better = method == Method::NaiveBayes;
            compare(
                method.name(),
                text,
                &oracle.languages,
                &expected,
                &p.scores,
                lower_is_better,
                &p.best,
            )?;
            compared += 1;
        }
    }

    let config = HeliConfig {
        lnr: Some(range),
        onr: Some(range),
        lw: case.lw,
        ow: case.ow,
        pm: case.pm,
        penalty: HeliPenalty::Totals,
    };
    let heli = HeliModelSet::build(&train, config).map_err(|e| e.to_string())?;
    let oracle = HeliOracle::new(&case.train, case.min, case.max, case.pm, case.lw, case.ow);
    for (i, text) in case.test.iter().enumerate() {
        let p = heli.classify(&Document::new(i, text.clone(), None));
        compare(
            "heli",
            text,
            &oracle.languages,
            &oracle.score(text),
            &p.scores,
            true,
            &p.best,
        )?;
        compared += 1;
    }
    Ok(compared)
}
