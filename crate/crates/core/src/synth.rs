//! Seeded synthetic corpora of code-mixed lines.
//!
//! Randomness comes from [`Lcg`], a 64-bit linear congruential generator with
//! Knuth's MMIX constants (`a = 6364136223846793005`,
//! `c = 1442695040888963407`). Only the upper bits of the state are used.
//! Corpora depend on nothing but the [`SynthSpec`], so the same seed gives the same
//! bytes on every platform.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }
}

/// Cumulative weights for inverse-transform sampling.
#[derive(Debug, Clone)]
struct Weighted {
    cumulative: Vec<f64>,
}

impl Weighted {
    fn new(weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut Lcg) -> usize {
        let u = rng.next_f64();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthLanguage {
    pub code: String,
    /// Alphabetic characters words are built from.
    pub inventory: Vec<char>,
    /// One positive weight per inventory character.
    pub weights: Vec<f64>,
    /// `word_lengths[i]` is the weight of words with `i + 1` characters.
    pub word_lengths: Vec<f64>,
    /// Size of the fixed lexicon words are drawn from; 0 draws a fresh
    /// random word every time.
    pub vocabulary: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub languages: Vec<SynthLanguage>,
    /// The embedded language mixed into every line. Its code is not used as
    /// a label.
    pub shared: Option<SynthLanguage>,
    pub lines_per_language: usize,
    /// Inclusive bounds on the number of words in a line.
    pub words_per_line: (usize, usize),
    /// Probability that a word comes from the shared language.
    pub mixing_rate: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSynthSpec(msg.into()));
        if self.languages.is_empty() {
            return bad("no languages");
        }
        let codes: BTreeSet<&str> = self.languages.iter().map(|l| l.code.as_str()).collect();
        if codes.len() != self.languages.len() {
            return bad("duplicate language code");
        }
        for lang in self.languages.iter().chain(&self.shared) {
            lang.validate()?;
        }
        if !(0.0..1.0).contains(&self.mixing_rate) {
            return bad("mixing rate must lie in [0, 1)");
        }
        if self.mixing_rate > 0.0 && self.shared.is_none() {
            return bad("mixing rate above 0 needs a shared language");
        }
        let (lo, hi) = self.words_per_line;
        if lo == 0 || lo > hi {
            return bad("words per line must satisfy 1 <= min <= max");
        }
        Ok(())
    }
}

impl SynthLanguage {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSynthSpec(msg));
        if self.code.is_empty() || self.code.chars().any(char::is_whitespace) {
            return bad(alloc::format!("bad language code {:?}", self.code));
        }
        if self.inventory.is_empty() {
            return bad(alloc::format!("{}: empty inventory", self.code));
        }
        if let Some(c) = self.inventory.iter().find(|c| !c.is_alphabetic()) {
            return bad(alloc::format!("{}: {c:?} is not alphabetic", self.code));
        }
        if self.weights.len() != self.inventory.len() {
            return bad(alloc::format!(
                "{}: one weight per character required",
                self.code
            ));
        }
        let positive = |w: &f64| w.is_finite() && *w > 0.0;
        if !self.weights.iter().all(positive) {
            return bad(alloc::format!("{}: weights must be positive", self.code));
        }
        if self.word_lengths.is_empty()
            || !self.word_lengths.iter().all(|w| w.is_finite() && *w >= 0.0)
        {
            return bad(alloc::format!(
                "{}: bad word length distribution",
                self.code
            ));
        }
        if !self.word_lengths.iter().any(positive) {
            return bad(alloc::format!(
                "{}: word length weights are all zero",
                self.code
            ));
        }
        Ok(())
    }
}

struct WordSource {
    chars: Vec<char>,
    char_dist: Weighted,
    length_dist: Weighted,
    lexicon: Vec<String>,
}

impl WordSource {
    fn new(lang: &SynthLanguage, rng: &mut Lcg) -> Self {
        let mut source = Self {
            chars: lang.inventory.clone(),
            char_dist: Weighted::new(&lang.weights),
            length_dist: Weighted::new(&lang.word_lengths),
            lexicon: Vec::new(),
        };
        source.lexicon = (0..lang.vocabulary).map(|_| source.fresh(rng)).collect();
        source
    }

    fn fresh(&self, rng: &mut Lcg) -> String {
        let len = self.length_dist.sample(rng) + 1;
        (0..len)
            .map(|_| self.chars[self.char_dist.sample(rng)])
            .collect()
    }

    fn word(&self, rng: &mut Lcg) -> String {
        if self.lexicon.is_empty() {
            self.fresh(rng)
        } else {
            self.lexicon[rng.below(self.lexicon.len())].clone()
        }
    }
}

/// Generates `lines_per_language` lines for every language, interleaved
/// round-robin in spec order.
pub fn generate(spec: &SynthSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = Lcg::new(spec.seed);
    let sources: Vec<WordSource> = spec
        .languages
        .iter()
        .map(|l| WordSource::new(l, &mut rng))
        .collect();
    let shared = spec.shared.as_ref().map(|l| WordSource::new(l, &mut rng));
    let (lo, hi) = spec.words_per_line;

    let mut docs = Vec::with_capacity(spec.lines_per_language * spec.languages.len());
    for _ in 0..spec.lines_per_language {
        for (lang, source) in spec.languages.iter().zip(&sources) {
            let words = lo + rng.below(hi - lo + 1);
            let mut line = String::new();
            for i in 0..words {
                if i > 0 {
                    line.push(' ');
                }
                let from_shared = rng.next_f64() < spec.mixing_rate;
                let word = match (&shared, from_shared) {
                    (Some(s), true) => s.word(&mut rng),
                    _ => source.word(&mut rng),
                };
                line.push_str(&word);
            }
            docs.push(Document::labeled(docs.len(), line, lang.code.clone()));
        }
    }
    Ok(Corpus::new(docs))
}
