//! Rendering experiment results as markdown tables or flat CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evaluator::{CellStatus, ExperimentReport};
use crate::sampler::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown report format `{other}` (csv or markdown)"
            ))),
        }
    }
}

/// Best accuracy as a percentage with two decimals, e.g. `84.72%`.
pub fn percent(accuracy: f64) -> String {
    format!("{:.2}%", accuracy * 100.0)
}

/// Renders the report. Markdown gives one table per (dataset, label) with a
/// row per sample size and a column per strategy/classifier pair; the
/// strategy prefix is left out when only one strategy is present. Skipped
/// cells show `—` with the reason as a footnote. CSV is the flat
/// per-iteration results table.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    if report.cells.is_empty() {
        return Err(Error::Emission("report has no cells".into()));
    }
    match format {
        ReportFormat::Csv => report.results_csv(),
        ReportFormat::Markdown => Ok(markdown(report)),
    }
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let mut notes: Vec<String> = Vec::new();
    for (dataset, label) in report.blocks() {
        let cells: Vec<_> = report
            .cells
            .iter()
            .filter(|c| c.dataset == dataset && c.label == label)
            .collect();
        let mut sizes = Vec::new();
        let mut groups: Vec<(Strategy, &str)> = Vec::new();
        let mut strategies = Vec::new();
        for c in &cells {
            push_unique(&mut sizes, c.sample_size);
            push_unique(&mut groups, (c.strategy, c.classifier.as_str()));
            push_unique(&mut strategies, c.strategy);
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "## {dataset}: {label}\n");
        if strategies.len() == 1 {
            let _ = writeln!(out, "Sampling: {}\n", strategies[0].title());
        }
        let heads: Vec<String> = groups
            .iter()
            .map(|(s, c)| {
                if strategies.len() == 1 {
                    c.to_string()
                } else {
                    format!("{} {c}", s.title())
                }
            })
            .collect();
        let _ = writeln!(out, "| Sample size | {} |", heads.join(" | "));
        let _ = writeln!(out, "|---:|{}", "---:|".repeat(heads.len()));
        for &size in &sizes {
            let mut row = vec![size.to_string()];
            for &(s, c) in &groups {
                let cell = cells
                    .iter()
                    .find(|x| x.sample_size == size && x.strategy == s && x.classifier == c);
                row.push(match cell.map(|x| (&x.status, x.best())) {
                    Some((CellStatus::Ok, Some(b))) => percent(b),
                    Some((CellStatus::Skipped(reason), _)) => {
                        let n = match notes.iter().position(|r| r == reason) {
                            Some(i) => i + 1,
                            None => {
                                notes.push(reason.clone());
                                notes.len()
                            }
                        };
                        format!("—[^{n}]")
                    }
                    _ => String::new(),
                });
            }
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
    }
    if !notes.is_empty() {
        out.push('\n');
        for (i, r) in notes.iter().enumerate() {
            let _ = writeln!(out, "[^{}]: Skipped: {}", i + 1, r.replace('\n', " "));
        }
    }
    out
}
