//! Line-oriented TSV files: corpora, predictions and adaptation traces.
//!
//! A labeled corpus line is `text<TAB>label`; an unlabeled one is the bare
//! text. Both `\n` and `\r\n` endings are accepted. Line numbers in errors
//! are 1-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mixlid_core::{Corpus, Document, Prediction, TraceRow};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Labeled,
    Unlabeled,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Splits file contents into lines without their terminators. A final
/// terminator does not start an extra line.
pub(crate) fn lines(contents: &str) -> impl Iterator<Item = &str> {
    let body = contents.strip_prefix('\u{feff}').unwrap_or(contents);
    let body = body.strip_suffix('\n').unwrap_or(body);
    body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l))
}

pub fn load_tsv(path: impl AsRef<Path>, mode: Mode) -> Result<Corpus> {
    let path = path.as_ref();
    parse_tsv(&read(path)?, mode, path)
}

/// Parses corpus text; `origin` only labels error messages.
pub fn parse_tsv(contents: &str, mode: Mode, origin: &Path) -> Result<Corpus> {
    if contents.is_empty() {
        return Err(Error::EmptyFile(origin.into()));
    }
    let mut docs = Vec::new();
    for (id, line) in lines(contents).enumerate() {
        let doc = match mode {
            Mode::Unlabeled => Document::new(id, line, None),
            Mode::Labeled => {
                let fields: Vec<&str> = line.split('\t').collect();
                let [text, label] = fields[..] else {
                    return Err(Error::parse(
                        origin,
                        id + 1,
                        format!("expected text<TAB>label, found {} field(s)", fields.len()),
                    ));
                };
                let label = label.trim();
                if label.is_empty() {
                    return Err(Error::parse(origin, id + 1, "empty label"));
                }
                Document::labeled(id, text, label)
            }
        };
        docs.push(doc);
    }
    Ok(Corpus::new(docs))
}

/// Writes a corpus in the format [`load_tsv`] reads. Labels are written when
/// every document has one.
pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    let labeled = corpus.is_labeled() && !corpus.is_empty();
    let mut out = String::new();
    for doc in &corpus.docs {
        out.push_str(&doc.text);
        if labeled {
            out.push('\t');
            out.push_str(doc.label.as_deref().unwrap_or_default());
        }
        out.push('\n');
    }
    write(path.as_ref(), &out)
}

/// `doc_id<TAB>predicted_label<TAB>margin` per line.
pub fn format_predictions(predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for p in predictions {
        let _ = writeln!(out, "{}\t{}\t{}", p.doc_id, p.best, p.margin);
    }
    out
}

pub fn write_predictions(path: impl AsRef<Path>, predictions: &[Prediction]) -> Result<()> {
    write(path.as_ref(), &format_predictions(predictions))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub doc_id: usize,
    pub label: String,
    pub margin: f64,
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRow>> {
    let path = path.as_ref();
    let contents = read(path)?;
    if contents.is_empty() {
        return Ok(Vec::new());
    }
    lines(&contents)
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, label, margin] = fields[..] else {
                return Err(Error::parse(
                    path,
                    i + 1,
                    "expected doc_id<TAB>label<TAB>margin",
                ));
            };
            Ok(PredictionRow {
                doc_id: id
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad doc id {id:?}")))?,
                label: label.to_string(),
                margin: margin
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad margin {margin:?}")))?,
            })
        })
        .collect()
}

/// `iteration<TAB>doc_id<TAB>predicted<TAB>margin<TAB>adopted` per line.
pub fn write_trace(path: impl AsRef<Path>, trace: &[TraceRow]) -> Result<()> {
    let mut out = String::new();
    for row in trace {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            row.iteration, row.doc_id, row.predicted, row.margin, row.adopted as u8
        );
    }
    write(path.as_ref(), &out)
}
