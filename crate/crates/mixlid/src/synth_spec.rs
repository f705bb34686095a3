//! JSON description of a synthetic corpus.
//!
//! ```json
//! {
//!   "seed": 7,
//!   "lines_per_language": 1000,
//!   "words_per_line": [3, 12],
//!   "mixing_rate": 0.25,
//!   "languages": [
//!     { "code": "kan", "inventory": "abcdefghij", "word_lengths": [0, 1, 2, 3, 2, 1], "vocabulary": 300 }
//!   ],
//!   "shared": { "code": "eng", "inventory": "klmnop", "word_lengths": [1, 2, 2, 1] }
//! }
//! ```
//!
//! `weights` defaults to uniform and `vocabulary` to 0 (fresh words).

use std::path::Path;

use mixlid_core::{SynthLanguage, SynthSpec};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageFile {
    code: String,
    inventory: String,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    word_lengths: Vec<f64>,
    #[serde(default)]
    vocabulary: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    seed: u64,
    lines_per_language: usize,
    words_per_line: (usize, usize),
    #[serde(default)]
    mixing_rate: f64,
    languages: Vec<LanguageFile>,
    #[serde(default)]
    shared: Option<LanguageFile>,
}

impl From<LanguageFile> for SynthLanguage {
    fn from(file: LanguageFile) -> Self {
        let inventory: Vec<char> = file.inventory.chars().collect();
        let weights = file.weights.unwrap_or_else(|| vec![1.0; inventory.len()]);
        SynthLanguage {
            code: file.code,
            inventory,
            weights,
            word_lengths: file.word_lengths,
            vocabulary: file.vocabulary,
        }
    }
}

pub fn parse_synth_spec(json: &str, origin: &Path) -> Result<SynthSpec> {
    let file: SpecFile = serde_json::from_str(json).map_err(|e| Error::Format {
        path: origin.into(),
        message: e.to_string(),
    })?;
    let spec = SynthSpec {
        languages: file.languages.into_iter().map(Into::into).collect(),
        shared: file.shared.map(Into::into),
        lines_per_language: file.lines_per_language,
        words_per_line: file.words_per_line,
        mixing_rate: file.mixing_rate,
        seed: file.seed,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_synth_spec(path: impl AsRef<Path>) -> Result<SynthSpec> {
    let path = path.as_ref();
    let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_synth_spec(&json, path)
}
