//! Alphabetic normalization.
//!
//! Every character without the Unicode `Alphabetic` property acts as a word
//! separator. Words keep their original casing alongside a fully
//! case-mapped lowercase copy.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizedText {
    pub words: Vec<String>,
    pub lowercased: Vec<String>,
}

impl NormalizedText {
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Word sequence in the requested casing.
    pub fn words_in(&self, lowercase: bool) -> &[String] {
        if lowercase {
            &self.lowercased
        } else {
            &self.words
        }
    }

    /// All words glued together without separators (the "remove everything
    /// non-alphabetic, spaces included" reading of the preprocessing).
    pub fn concatenated(&self, lowercase: bool) -> String {
        self.words_in(lowercase).concat()
    }
}

pub fn normalize(text: &str) -> NormalizedText {
    let mut words = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            current.push(ch);
        } else if !current.is_empty() {
            words.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    let lowercased = words.iter().map(|w| lowercase(w)).collect();
    NormalizedText { words, lowercased }
}

/// Full Unicode lowercase mapping, locale-insensitive.
pub fn lowercase(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    for ch in word.chars() {
        out.extend(ch.to_lowercase());
    }
    out
}
