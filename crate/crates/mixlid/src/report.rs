//! Evaluation report output: TSV for files, an aligned table for people.

use std::fmt::Write as _;

use mixlid_core::EvalReport;

/// Per-class rows, the two averages, then the confusion matrix with gold
/// labels as rows.
pub fn format_report_tsv(report: &EvalReport) -> String {
    let mut out = String::from("class\tprecision\trecall\tf1\tsupport\n");
    for (class, m) in &report.per_class {
        let _ = writeln!(
            out,
            "{class}\t{:.6}\t{:.6}\t{:.6}\t{}",
            m.precision, m.recall, m.f1, m.support
        );
    }
    let _ = writeln!(out, "macro_f1\t\t\t{:.6}\t{}", report.macro_f1, report.n);
    let _ = writeln!(out, "micro_f1\t\t\t{:.6}\t{}", report.micro_f1, report.n);
    out.push('\n');
    let labels = report.labels();
    out.push_str("gold\\predicted");
    for label in &labels {
        let _ = write!(out, "\t{label}");
    }
    out.push('\n');
    for gold in report.per_class.keys() {
        out.push_str(gold);
        for predicted in &labels {
            let _ = write!(out, "\t{}", report.cell(gold, predicted));
        }
        out.push('\n');
    }
    out
}

pub fn format_report_table(report: &EvalReport) -> String {
    let labels = report.labels();
    let width = labels
        .iter()
        .map(|l| l.chars().count())
        .chain(["micro F1".len()])
        .max()
        .unwrap_or(0)
        + 2;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}{:>10}{:>10}{:>10}{:>10}",
        "class", "precision", "recall", "F1", "support"
    );
    for (class, m) in &report.per_class {
        let _ = writeln!(
            out,
            "{class:<width$}{:>10.4}{:>10.4}{:>10.4}{:>10}",
            m.precision, m.recall, m.f1, m.support
        );
    }
    let _ = writeln!(
        out,
        "{:<width$}{:>30.4}{:>10}",
        "macro F1", report.macro_f1, report.n
    );
    let _ = writeln!(
        out,
        "{:<width$}{:>30.4}{:>10}",
        "micro F1", report.micro_f1, report.n
    );
    out.push('\n');
    let cell = labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        .max(6)
        + 2;
    let _ = write!(out, "{:<width$}", "gold \\ pred");
    for label in &labels {
        let _ = write!(out, "{label:>cell$}");
    }
    out.push('\n');
    for gold in report.per_class.keys() {
        let _ = write!(out, "{gold:<width$}");
        for predicted in &labels {
            let _ = write!(out, "{:>cell$}", report.cell(gold, predicted));
        }
        out.push('\n');
    }
    out
}
