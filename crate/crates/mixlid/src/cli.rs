//! The `mixlid` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data or model
//! errors. Diagnostics go to stderr only.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use mixlid_core::adaptation::AdaptOutcome;
use mixlid_core::corpus::SplitSide;
use mixlid_core::{
    adaptive_identify, generate, ordered_split, AdaptConfig, Corpus, FeatureConfig, HeliConfig,
    HeliModelSet, HeliPenalty, Identifier, Method, ModelSet, NgramClassifier, NgramRange,
    Prediction, Splits,
};
use rayon::prelude::*;

use crate::model_file::{load_model, save_model, LoadedModel};
use crate::report::{format_report_table, format_report_tsv};
use crate::sweep::{format_sweep, parse_pms, parse_ranges, sweep, SweepMethod};
use crate::synth_spec::load_synth_spec;
use crate::tsv::{
    self, load_predictions, load_tsv, write_corpus, write_predictions, write_trace, Mode,
};

/// Language identification for short code-mixed texts with character n-gram models.
#[derive(Debug, Parser)]
#[command(name = "mixlid", version)]
pub struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a labeled corpus into the first fraction of every label and the rest.
    Split(SplitArgs),
    /// Train a model file from a labeled corpus.
    Train(TrainArgs),
    /// Identify the language of every line of a corpus.
    Identify(IdentifyArgs),
    /// Score predictions against a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Evaluate a grid of n-gram ranges and penalty modifiers.
    Sweep(SweepArgs),
    /// Generate a synthetic labeled corpus.
    Synth(SynthArgs),
    /// Naive Bayes over 2-6 grams, pm 2.15, one epoch of adaptation with 20 splits.
    System1(System1Args),
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    fraction: f64,
    #[arg(long, value_name = "OUT")]
    train: PathBuf,
    #[arg(long, value_name = "OUT")]
    dev: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrainMethod {
    Nb,
    Simple,
    Sumrf,
    Heli,
}

impl TrainMethod {
    fn ngram(self) -> Option<Method> {
        match self {
            TrainMethod::Nb => Some(Method::NaiveBayes),
            TrainMethod::Simple => Some(Method::Simple),
            TrainMethod::Sumrf => Some(Method::SumRelativeFrequencies),
            TrainMethod::Heli => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct FeatureArgs {
    /// Keep the original casing of n-grams (not used by heli).
    #[arg(long)]
    keep_case: bool,
    /// Do not pad words with spaces before cutting n-grams.
    #[arg(long)]
    no_padding: bool,
    /// Join all words of a line before cutting n-grams.
    #[arg(long)]
    concat: bool,
}

impl FeatureArgs {
    fn config(&self) -> FeatureConfig {
        FeatureConfig {
            lowercase: !self.keep_case,
            padding: !self.no_padding,
            concat: self.concat,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct HeliArgs {
    /// Lowercased n-gram range for heli, or "-" to disable.
    #[arg(long, default_value = "2-6")]
    lnr: GramRange,
    /// Original-case n-gram range for heli, or "-" to disable.
    #[arg(long, default_value = "2-6")]
    onr: GramRange,
    /// Use lowercased words (y/n).
    #[arg(long, default_value = "y", value_parser = parse_flag, action = ArgAction::Set)]
    lw: bool,
    /// Use original-case words (y/n).
    #[arg(long, default_value = "y", value_parser = parse_flag, action = ArgAction::Set)]
    ow: bool,
    /// Replace the totals-based heli penalty by a constant.
    #[arg(long, value_name = "VALUE")]
    constant_penalty: Option<f64>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = TrainMethod::Nb)]
    method: TrainMethod,
    #[arg(long, default_value_t = 2)]
    min_n: usize,
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Penalty modifier (default 2.15, or 1.11 for heli).
    #[arg(long)]
    pm: Option<f64>,
    #[arg(long, value_name = "OUT")]
    model: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    heli: HeliArgs,
}

#[derive(Debug, Clone, Copy, Args)]
struct AdaptArgs {
    /// Number of adaptation splits, or "full" for one line per split.
    #[arg(long, value_parser = parse_splits)]
    adapt_k: Option<Splits>,
    /// Confidence threshold: lines with a margin at or below it are never adopted.
    #[arg(long)]
    ct: Option<f64>,
    /// Adaptation epochs (default 1 when --adapt-k or --ct is given, else 0).
    #[arg(long)]
    epochs: Option<usize>,
    /// Re-score only languages whose models changed (same results, less work).
    #[arg(long)]
    incremental: bool,
}

impl AdaptArgs {
    fn config(&self) -> AdaptConfig {
        let wants = self.adapt_k.is_some() || self.ct.is_some();
        AdaptConfig {
            splits: self.adapt_k.unwrap_or(Splits::Count(1)),
            threshold: self.ct,
            epochs: self.epochs.unwrap_or(wants as usize),
            incremental: self.incremental,
        }
    }
}

#[derive(Debug, Args)]
struct IdentifyArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// The input has labels (they are ignored).
    #[arg(long)]
    labeled: bool,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    adapt: AdaptArgs,
    /// Write the adaptation trace as TSV.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Also write the report as TSV.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeliGrams {
    Both,
    Lower,
    Original,
    None,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    dev: PathBuf,
    #[arg(long, value_enum)]
    method: TrainMethod,
    /// Comma-separated ranges: "2-6", "4", or "all:1-10" for every sub-range.
    #[arg(long)]
    ranges: String,
    /// Comma-separated penalty modifiers or start:stop:step spans.
    #[arg(long)]
    pms: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    adapt: AdaptArgs,
    #[command(flatten)]
    features: FeatureArgs,
    /// Which heli gram domains take the swept range.
    #[arg(long, value_enum, default_value_t = HeliGrams::Both)]
    heli_grams: HeliGrams,
    #[arg(long, default_value = "y", value_parser = parse_flag, action = ArgAction::Set)]
    lw: bool,
    #[arg(long, default_value = "y", value_parser = parse_flag, action = ArgAction::Set)]
    ow: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct System1Args {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    test: PathBuf,
    /// The test file has labels (they are ignored).
    #[arg(long)]
    labeled_test: bool,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, default_value = "20", value_parser = parse_splits)]
    adapt_k: Splits,
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

fn parse_splits(s: &str) -> Result<Splits, String> {
    if s.eq_ignore_ascii_case("full") || s.eq_ignore_ascii_case("max") {
        return Ok(Splits::Full);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!(
            "expected a positive integer or \"full\", got {s:?}"
        )),
        Ok(k) => Ok(Splits::Count(k)),
    }
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s {
        "y" | "yes" => Ok(true),
        "n" | "no" => Ok(false),
        _ => Err(format!("expected y or n, got {s:?}")),
    }
}

/// An n-gram range that `-` or `none` switches off.
#[derive(Debug, Clone, Copy)]
struct GramRange(Option<NgramRange>);

impl FromStr for GramRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "-" | "none" => Ok(GramRange(None)),
            _ => s
                .parse()
                .map(|r| GramRange(Some(r)))
                .map_err(|e: mixlid_core::Error| e.to_string()),
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn execute(cli: Cli) -> anyhow::Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("starting worker threads")?;
    pool.install(|| match cli.command {
        Command::Split(args) => split(args),
        Command::Train(args) => train(args),
        Command::Identify(args) => identify(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Synth(args) => synth(args),
        Command::System1(args) => system1(args),
    })
}

fn split(args: SplitArgs) -> anyhow::Result<()> {
    if !(args.fraction > 0.0 && args.fraction < 1.0) {
        return Err(UsageError(format!(
            "--fraction must lie strictly between 0 and 1, got {}",
            args.fraction
        ))
        .into());
    }
    let corpus = load_tsv(&args.input, Mode::Labeled)?;
    let (train, dev, warnings) = ordered_split(&corpus, args.fraction)?;
    for w in warnings {
        let side = match w.empty_side {
            SplitSide::Train => "training",
            SplitSide::Dev => "development",
        };
        eprintln!("warning: label {:?} has no {side} documents", w.label);
    }
    write_corpus(&args.train, &train)?;
    write_corpus(&args.dev, &dev)?;
    Ok(())
}

fn heli_config(heli: &HeliArgs, pm: f64) -> HeliConfig {
    HeliConfig {
        lnr: heli.lnr.0,
        onr: heli.onr.0,
        lw: heli.lw,
        ow: heli.ow,
        pm,
        penalty: heli
            .constant_penalty
            .map_or(HeliPenalty::Totals, HeliPenalty::Constant),
    }
}

fn train(args: TrainArgs) -> anyhow::Result<()> {
    let corpus = load_tsv(&args.input, Mode::Labeled)?;
    let model = match args.method.ngram() {
        Some(method) => {
            let range =
                NgramRange::new(args.min_n, args.max_n).map_err(|e| UsageError(e.to_string()))?;
            let set = ModelSet::build(
                &corpus,
                range,
                args.pm.unwrap_or(2.15),
                args.features.config(),
            )?;
            LoadedModel::Ngram(NgramClassifier::new(set, method))
        }
        None => LoadedModel::Heli(HeliModelSet::build(
            &corpus,
            heli_config(&args.heli, args.pm.unwrap_or(1.11)),
        )?),
    };
    save_model(&args.model, &model)?;
    Ok(())
}

/// Batch classification in parallel, or sequential adaptation.
fn run_identifier<I>(
    test: &Corpus,
    mut identifier: I,
    config: &AdaptConfig,
) -> anyhow::Result<AdaptOutcome>
where
    I: Identifier + Sync,
{
    if config.epochs == 0 {
        config.validate()?;
        let predictions: Vec<Prediction> = test
            .docs
            .par_iter()
            .map(|d| identifier.predict(d))
            .collect();
        return Ok(AdaptOutcome {
            predictions,
            trace: Vec::new(),
        });
    }
    Ok(adaptive_identify(test, &mut identifier, config)?)
}

fn write_outcome(
    outcome: &AdaptOutcome,
    out: &PathBuf,
    trace: Option<&PathBuf>,
) -> anyhow::Result<()> {
    write_predictions(out, &outcome.predictions)?;
    if let Some(path) = trace {
        write_trace(path, &outcome.trace)?;
    }
    Ok(())
}

fn check_adapt(config: &AdaptConfig) -> anyhow::Result<()> {
    config
        .validate()
        .map_err(|e| UsageError(e.to_string()).into())
}

fn identify(args: IdentifyArgs) -> anyhow::Result<()> {
    let config = args.adapt.config();
    check_adapt(&config)?;
    let model = load_model(&args.model)?;
    let mode = if args.labeled {
        Mode::Labeled
    } else {
        Mode::Unlabeled
    };
    let test = load_tsv(&args.input, mode)?;
    let outcome = match model {
        LoadedModel::Ngram(c) => run_identifier(&test, c, &config)?,
        LoadedModel::Heli(h) => run_identifier(&test, h, &config)?,
    };
    write_outcome(&outcome, &args.out, args.trace.as_ref())
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let gold = load_tsv(&args.gold, Mode::Labeled)?;
    let rows = load_predictions(&args.pred)?;
    let report = mixlid_core::evaluate(rows.iter().map(|r| (r.doc_id, r.label.as_str())), &gold)
        .with_context(|| {
            format!(
                "scoring {} against {}",
                args.pred.display(),
                args.gold.display()
            )
        })?;
    print!("{}", format_report_table(&report));
    if let Some(path) = &args.report {
        tsv::write(path, &format_report_tsv(&report))?;
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let ranges = parse_ranges(&args.ranges).map_err(|e| UsageError(e.to_string()))?;
    let method = match args.method.ngram() {
        Some(m) => SweepMethod::Ngram(m),
        None => {
            let (lowercase_grams, original_grams) = match args.heli_grams {
                HeliGrams::Both => (true, true),
                HeliGrams::Lower => (true, false),
                HeliGrams::Original => (false, true),
                HeliGrams::None => (false, false),
            };
            SweepMethod::Heli {
                lowercase_grams,
                original_grams,
                lw: args.lw,
                ow: args.ow,
            }
        }
    };
    let pms = match (&args.pms, args.method) {
        (Some(spec), _) => parse_pms(spec).map_err(|e| UsageError(e.to_string()))?,
        (None, TrainMethod::Simple | TrainMethod::Sumrf) => Vec::new(),
        (None, _) => bail!(UsageError(format!(
            "--pms is required for {}",
            method.name()
        ))),
    };
    let adapt = args.adapt.config();
    check_adapt(&adapt)?;
    let train = load_tsv(&args.train, Mode::Labeled)?;
    let dev = load_tsv(&args.dev, Mode::Labeled)?;
    let rows = sweep(
        &train,
        &dev,
        method,
        &ranges,
        &pms,
        (adapt.epochs > 0).then_some(&adapt),
        args.features.config(),
    )?;
    tsv::write(&args.out, &format_sweep(&rows))?;
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let spec = load_synth_spec(&args.spec)?;
    write_corpus(&args.out, &generate(&spec)?)?;
    Ok(())
}

fn system1(args: System1Args) -> anyhow::Result<()> {
    let train = load_tsv(&args.train, Mode::Labeled)?;
    let mode = if args.labeled_test {
        Mode::Labeled
    } else {
        Mode::Unlabeled
    };
    let test = load_tsv(&args.test, mode)?;
    let range = NgramRange::new(2, 6)?;
    let set = ModelSet::build(&train, range, 2.15, FeatureConfig::default())?;
    let config = AdaptConfig {
        splits: args.adapt_k,
        threshold: None,
        epochs: 1,
        incremental: true,
    };
    let outcome = run_identifier(
        &test,
        NgramClassifier::new(set, Method::NaiveBayes),
        &config,
    )?;
    write_outcome(&outcome, &args.out, args.trace.as_ref())
}
