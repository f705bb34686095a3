//! Text model files.
//!
//! An n-gram model file starts with
//!
//! ```text
//! #version 1
//! #range <min> <max>
//! #pm <penalty modifier>
//! #log natural
//! ```
//!
//! followed by `language<TAB>length<TAB>gram<TAB>count` rows sorted by
//! language, length and gram code points. Settings that differ from the
//! defaults add header lines after `#log`: `#method simple|sumrf`,
//! `#case original`, `#padding none`, `#concat yes`.
//!
//! A HeLI model file declares `#method heli` right after the version, then
//! `#lnr`, `#onr` (a range or `-`), `#lw`, `#ow` (`y`/`n`), `#pm`, `#log
//! natural` and optionally `#penalty constant <value>`. Its rows are
//! `language<TAB>kind<TAB>length<TAB>item<TAB>count` with kind one of
//! `wordO`, `wordL`, `gramO`, `gramL`; word rows have length 0.
//!
//! Files always end with a newline; a missing final newline is reported as
//! truncation.

use std::fmt::Write as _;
use std::path::Path;

use mixlid_core::heli::Domain;
use mixlid_core::{
    FeatureConfig, HeliConfig, HeliModelSet, HeliPenalty, Method, ModelSet, NgramClassifier,
    NgramModel, NgramRange,
};

use crate::error::{Error, Result};
use crate::tsv::{lines, write};

pub const VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    Ngram(NgramClassifier),
    Heli(HeliModelSet),
}

pub fn format_ngram(classifier: &NgramClassifier) -> String {
    let set = &classifier.models;
    let range = set.range();
    let features = set.features();
    let mut out = String::new();
    let _ = writeln!(out, "#version {VERSION}");
    let _ = writeln!(out, "#range {} {}", range.min(), range.max());
    let _ = writeln!(out, "#pm {}", set.penalty_modifier());
    out.push_str("#log natural\n");
    if classifier.method != Method::NaiveBayes {
        let _ = writeln!(out, "#method {}", classifier.method);
    }
    if !features.lowercase {
        out.push_str("#case original\n");
    }
    if !features.padding {
        out.push_str("#padding none\n");
    }
    if features.concat {
        out.push_str("#concat yes\n");
    }
    for model in set.models() {
        for (length, gram, count) in model.rows() {
            let _ = writeln!(out, "{}\t{length}\t{gram}\t{count}", model.language());
        }
    }
    out
}

pub fn format_heli(models: &HeliModelSet) -> String {
    let config = models.config();
    let range = |r: Option<NgramRange>| {
        r.map_or_else(|| "-".to_string(), |r| format!("{} {}", r.min(), r.max()))
    };
    let flag = |b: bool| if b { "y" } else { "n" };
    let mut out = String::new();
    let _ = writeln!(out, "#version {VERSION}");
    out.push_str("#method heli\n");
    let _ = writeln!(out, "#lnr {}", range(config.lnr));
    let _ = writeln!(out, "#onr {}", range(config.onr));
    let _ = writeln!(out, "#lw {}", flag(config.lw));
    let _ = writeln!(out, "#ow {}", flag(config.ow));
    let _ = writeln!(out, "#pm {}", config.pm);
    out.push_str("#log natural\n");
    if let HeliPenalty::Constant(c) = config.penalty {
        let _ = writeln!(out, "#penalty constant {c}");
    }
    for (language, domain, length, item, count) in models.rows() {
        let _ = writeln!(out, "{language}\t{domain}\t{length}\t{item}\t{count}");
    }
    out
}

pub fn save_ngram(path: impl AsRef<Path>, classifier: &NgramClassifier) -> Result<()> {
    write(path.as_ref(), &format_ngram(classifier))
}

pub fn save_heli(path: impl AsRef<Path>, models: &HeliModelSet) -> Result<()> {
    write(path.as_ref(), &format_heli(models))
}

pub fn save_model(path: impl AsRef<Path>, model: &LoadedModel) -> Result<()> {
    match model {
        LoadedModel::Ngram(c) => save_ngram(path, c),
        LoadedModel::Heli(h) => save_heli(path, h),
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel> {
    let path = path.as_ref();
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&contents, path)
}

struct Header<'a> {
    entries: Vec<(usize, &'a str, &'a str)>,
}

impl<'a> Header<'a> {
    fn take(&mut self, key: &str) -> Option<(usize, &'a str)> {
        let pos = self.entries.iter().position(|(_, k, _)| *k == key)?;
        let (line, _, value) = self.entries.remove(pos);
        Some((line, value))
    }
}

pub fn parse_model(contents: &str, origin: &Path) -> Result<LoadedModel> {
    let format_err = |message: String| Error::Format {
        path: origin.into(),
        message,
    };
    if contents.is_empty() {
        return Err(Error::EmptyFile(origin.into()));
    }
    if !contents.ends_with('\n') {
        return Err(format_err("truncated file (no final newline)".into()));
    }
    let all: Vec<&str> = lines(contents).collect();
    let mut header = Header {
        entries: Vec::new(),
    };
    let mut first_row = all.len();
    for (i, line) in all.iter().enumerate() {
        let Some(rest) = line.strip_prefix('#') else {
            first_row = i;
            break;
        };
        let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
        header.entries.push((i + 1, key, value.trim()));
    }
    match header.entries.first() {
        Some((1, "version", v)) if *v == VERSION => {}
        Some((1, "version", v)) => {
            return Err(format_err(format!("unsupported model version {v:?}")))
        }
        _ => return Err(format_err("missing #version header".into())),
    }
    header.entries.remove(0);
    match header.take("log") {
        Some((_, "natural")) => {}
        Some((line, other)) => {
            return Err(Error::parse(
                origin,
                line,
                format!("unsupported log base {other:?}"),
            ))
        }
        None => return Err(format_err("missing #log header".into())),
    }
    let rows = &all[first_row..];
    let is_heli = matches!(
        header.entries.iter().find(|(_, k, _)| *k == "method"),
        Some((_, _, "heli"))
    );
    let model = if is_heli {
        header.take("method");
        LoadedModel::Heli(parse_heli(&mut header, rows, first_row, origin)?)
    } else {
        LoadedModel::Ngram(parse_ngram(&mut header, rows, first_row, origin)?)
    };
    if let Some((line, key, _)) = header.entries.first() {
        return Err(Error::parse(
            origin,
            *line,
            format!("unknown or repeated header #{key}"),
        ));
    }
    Ok(model)
}

fn required<'a>(header: &mut Header<'a>, key: &str, origin: &Path) -> Result<(usize, &'a str)> {
    header.take(key).ok_or_else(|| Error::Format {
        path: origin.into(),
        message: format!("missing #{key} header"),
    })
}

fn parse_range_pair(value: &str, line: usize, origin: &Path) -> Result<NgramRange> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let parsed = match parts[..] {
        [a, b] => a.parse().ok().zip(b.parse().ok()),
        _ => None,
    };
    let (min, max) =
        parsed.ok_or_else(|| Error::parse(origin, line, format!("bad range {value:?}")))?;
    NgramRange::new(min, max).map_err(|e| Error::parse(origin, line, e.to_string()))
}

fn parse_pm(header: &mut Header<'_>, origin: &Path) -> Result<f64> {
    let (line, value) = required(header, "pm", origin)?;
    value
        .parse()
        .map_err(|_| Error::parse(origin, line, format!("bad penalty modifier {value:?}")))
}

fn parse_count(field: &str, line: usize, origin: &Path) -> Result<u64> {
    field
        .parse()
        .map_err(|_| Error::parse(origin, line, format!("bad count {field:?}")))
}

fn parse_ngram(
    header: &mut Header<'_>,
    rows: &[&str],
    offset: usize,
    origin: &Path,
) -> Result<NgramClassifier> {
    let (line, value) = required(header, "range", origin)?;
    let range = parse_range_pair(value, line, origin)?;
    let pm = parse_pm(header, origin)?;
    let method = match header.take("method") {
        None => Method::NaiveBayes,
        Some((line, m)) => m
            .parse()
            .map_err(|e: String| Error::parse(origin, line, e))?,
    };
    let mut features = FeatureConfig::default();
    if let Some((line, v)) = header.take("case") {
        features.lowercase = match v {
            "original" => false,
            "lower" => true,
            _ => return Err(Error::parse(origin, line, format!("bad #case {v:?}"))),
        };
    }
    if let Some((line, v)) = header.take("padding") {
        features.padding = match v {
            "none" => false,
            "space" => true,
            _ => return Err(Error::parse(origin, line, format!("bad #padding {v:?}"))),
        };
    }
    if let Some((line, v)) = header.take("concat") {
        features.concat = match v {
            "yes" => true,
            "no" => false,
            _ => return Err(Error::parse(origin, line, format!("bad #concat {v:?}"))),
        };
    }

    // rows are grouped by language
    let mut groups: Vec<(&str, Vec<(&str, u64)>)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let line = offset + i + 1;
        let fields: Vec<&str> = row.split('\t').collect();
        let [language, length, gram, count] = fields[..] else {
            return Err(Error::parse(
                origin,
                line,
                "expected language<TAB>length<TAB>gram<TAB>count",
            ));
        };
        if language.is_empty() {
            return Err(Error::parse(origin, line, "empty language"));
        }
        let length: usize = length
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("bad length {length:?}")))?;
        if gram.chars().count() != length {
            return Err(Error::parse(
                origin,
                line,
                format!("gram {gram:?} is not {length} characters long"),
            ));
        }
        let count = parse_count(count, line, origin)?;
        match groups.iter_mut().find(|(l, _)| *l == language) {
            Some((_, entries)) => entries.push((gram, count)),
            None => groups.push((language, vec![(gram, count)])),
        }
    }
    let models = groups
        .into_iter()
        .map(|(language, entries)| NgramModel::from_counts(language, range, pm, entries))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let set = ModelSet::from_models(range, pm, features, models)?;
    Ok(NgramClassifier::new(set, method))
}

fn parse_heli(
    header: &mut Header<'_>,
    rows: &[&str],
    offset: usize,
    origin: &Path,
) -> Result<HeliModelSet> {
    let mut optional_range = |key: &str| -> Result<Option<NgramRange>> {
        let (line, value) = required(header, key, origin)?;
        if value == "-" {
            Ok(None)
        } else {
            parse_range_pair(value, line, origin).map(Some)
        }
    };
    let lnr = optional_range("lnr")?;
    let onr = optional_range("onr")?;
    let mut flag = |key: &str| -> Result<bool> {
        match required(header, key, origin)? {
            (_, "y") => Ok(true),
            (_, "n") => Ok(false),
            (line, v) => Err(Error::parse(origin, line, format!("bad #{key} flag {v:?}"))),
        }
    };
    let lw = flag("lw")?;
    let ow = flag("ow")?;
    let pm = parse_pm(header, origin)?;
    let penalty = match header.take("penalty") {
        None => HeliPenalty::Totals,
        Some((line, v)) => match v.split_once(' ') {
            Some(("constant", c)) => HeliPenalty::Constant(
                c.trim()
                    .parse()
                    .map_err(|_| Error::parse(origin, line, format!("bad penalty {v:?}")))?,
            ),
            _ => return Err(Error::parse(origin, line, format!("bad penalty {v:?}"))),
        },
    };
    let config = HeliConfig {
        lnr,
        onr,
        lw,
        ow,
        pm,
        penalty,
    };

    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let line = offset + i + 1;
        let fields: Vec<&str> = row.split('\t').collect();
        let [language, kind, length, item, count] = fields[..] else {
            return Err(Error::parse(
                origin,
                line,
                "expected language<TAB>kind<TAB>length<TAB>item<TAB>count",
            ));
        };
        let domain: Domain = kind
            .parse()
            .map_err(|e: mixlid_core::Error| Error::parse(origin, line, e.to_string()))?;
        let length: usize = length
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("bad length {length:?}")))?;
        let expected = if domain.is_word() {
            0
        } else {
            item.chars().count()
        };
        if length != expected {
            return Err(Error::parse(
                origin,
                line,
                format!("length {length} does not match item {item:?}"),
            ));
        }
        parsed.push((language, domain, item, parse_count(count, line, origin)?));
    }
    Ok(HeliModelSet::from_rows(config, parsed)?)
}
