//! Report artifacts: an accuracy table with "mean±half_range" cells and
//! completion-token means in brackets, ratio tables with min/mean/max,
//! and one 3x3 correlation matrix per provider. Each comes in a
//! machine-readable CSV and a rendered text variant.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{io_err, CampaignError};
use super::score::{ProviderSummary, RunSummary};
use super::REPORT_DIR;
use crate::stats::ConditionSummary;

pub const UNDEFINED_MARKER: &str = "—";

/// "0.95±0.02"
pub fn format_accuracy_cell(mean: f64, half_range: f64) -> String {
    format!("{mean:.2}±{half_range:.2}")
}

/// "(311.2)"
pub fn format_token_cell(mean_completion_tokens: f64) -> String {
    format!("({mean_completion_tokens:.1})")
}

fn accuracy_cell(condition: &ConditionSummary) -> (String, String) {
    let acc = match (condition.mean_accuracy, condition.half_range) {
        (Some(mean), Some(half)) => format_accuracy_cell(mean, half),
        _ => UNDEFINED_MARKER.to_string(),
    };
    let tokens = match condition.mean_completion_tokens {
        Some(mean) => format_token_cell(mean),
        None => UNDEFINED_MARKER.to_string(),
    };
    (acc, tokens)
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => String::new(),
    }
}

fn accuracy_csv(summary: &RunSummary) -> String {
    let mut out = String::from(
        "provider,strategy,mean_accuracy,half_range,mean_completion_tokens,completion_token_std,\
         prompt_token_mean,prompt_token_std,response_count,call_count,per_hop_accuracy\n",
    );
    for provider in &summary.providers {
        for c in &provider.conditions {
            let per_hop = c
                .per_hop_accuracy
                .iter()
                .map(|a| fmt_opt(*a))
                .collect::<Vec<_>>()
                .join(";");
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                provider.provider,
                c.strategy,
                fmt_opt(c.mean_accuracy),
                fmt_opt(c.half_range),
                fmt_opt(c.mean_completion_tokens),
                fmt_opt(c.completion_token_std),
                fmt_opt(c.prompt_token_mean),
                fmt_opt(c.prompt_token_std),
                c.response_count,
                c.call_count,
                per_hop,
            )
            .expect("string write");
        }
    }
    out
}

fn accuracy_table(summary: &RunSummary) -> String {
    let providers: Vec<&ProviderSummary> = summary.providers.iter().collect();
    let strategies: Vec<String> = summary
        .providers
        .first()
        .map(|p| p.conditions.iter().map(|c| c.strategy.to_string()).collect())
        .unwrap_or_default();

    let width = 18usize;
    let label_width = 16usize;
    let mut out = String::new();
    writeln!(out, "Accuracy per strategy (mean±half-range over hops; completion tokens in brackets)").unwrap();
    writeln!(out, "{}", summary.baseline_note).unwrap();
    writeln!(out, "token/std convention: {}", summary.std_convention).unwrap();
    out.push('\n');
    write!(out, "{:<label_width$}", "strategy").unwrap();
    for p in &providers {
        write!(out, "{:>width$}", p.provider).unwrap();
    }
    out.push('\n');
    for strategy in &strategies {
        write!(out, "{strategy:<label_width$}").unwrap();
        let mut token_row = format!("{:<label_width$}", "");
        for p in &providers {
            let cell = p
                .conditions
                .iter()
                .find(|c| &c.strategy.to_string() == strategy);
            match cell {
                Some(c) => {
                    let (acc, tokens) = accuracy_cell(c);
                    write!(out, "{acc:>width$}").unwrap();
                    write!(token_row, "{tokens:>width$}").unwrap();
                }
                None => {
                    write!(out, "{UNDEFINED_MARKER:>width$}").unwrap();
                    write!(token_row, "{UNDEFINED_MARKER:>width$}").unwrap();
                }
            }
        }
        out.push('\n');
        out.push_str(&token_row);
        out.push('\n');
    }
    out
}

fn ratios_csv(summary: &RunSummary) -> String {
    let mut out = String::from("provider,strategy,metric,mean,min,max\n");
    for provider in &summary.providers {
        for r in &provider.ratios {
            for ratio in [&r.has_reasoning, &r.all_steps, &r.faithful_given_all_steps] {
                let metric = match ratio.metric {
                    crate::stats::RatioMetric::HasReasoning => "has_reasoning",
                    crate::stats::RatioMetric::AllSteps => "all_steps",
                    crate::stats::RatioMetric::FaithfulGivenAllSteps => "faithful_given_all_steps",
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    provider.provider,
                    r.strategy,
                    metric,
                    fmt_opt(ratio.mean),
                    fmt_opt(ratio.min),
                    fmt_opt(ratio.max),
                )
                .expect("string write");
            }
        }
    }
    out
}

fn ratios_table(summary: &RunSummary) -> String {
    let mut out = String::new();
    writeln!(out, "Reasoning-presence and faithfulness ratios (mean [min, max] over hops)").unwrap();
    writeln!(out, "faithful_given_all_steps counts only calls that showed every required step").unwrap();
    out.push('\n');
    for provider in &summary.providers {
        writeln!(out, "provider: {}", provider.provider).unwrap();
        writeln!(
            out,
            "  {:<14}{:>26}{:>26}{:>26}",
            "strategy", "has_reasoning", "all_steps", "faithful|all_steps"
        )
        .unwrap();
        for r in &provider.ratios {
            let cell = |s: &crate::stats::RatioSummary| match (s.mean, s.min, s.max) {
                (Some(mean), Some(min), Some(max)) => {
                    format!("{mean:.3} [{min:.3}, {max:.3}]")
                }
                _ => UNDEFINED_MARKER.to_string(),
            };
            writeln!(
                out,
                "  {:<14}{:>26}{:>26}{:>26}",
                r.strategy.to_string(),
                cell(&r.has_reasoning),
                cell(&r.all_steps),
                cell(&r.faithful_given_all_steps),
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

fn matrix_cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.3}"),
        None => UNDEFINED_MARKER.to_string(),
    }
}

fn correlations_csv(summary: &RunSummary) -> String {
    let mut out = String::from("provider,row,column,phi\n");
    for provider in &summary.providers {
        if let Some(matrix) = &provider.correlations {
            for (i, row_label) in matrix.labels.iter().enumerate() {
                for (j, col_label) in matrix.labels.iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        provider.provider,
                        row_label,
                        col_label,
                        fmt_opt(matrix.entries[i][j]),
                    )
                    .expect("string write");
                }
            }
        }
    }
    out
}

fn correlations_table(summary: &RunSummary) -> String {
    let mut out = String::new();
    writeln!(out, "Correlation matrices ({})", summary.correlation_kind).unwrap();
    out.push('\n');
    for provider in &summary.providers {
        writeln!(out, "provider: {}", provider.provider).unwrap();
        match &provider.correlations {
            Some(matrix) => {
                write!(out, "  {:<16}", "").unwrap();
                for label in &matrix.labels {
                    write!(out, "{label:>16}").unwrap();
                }
                out.push('\n');
                for (i, label) in matrix.labels.iter().enumerate() {
                    write!(out, "  {label:<16}").unwrap();
                    for j in 0..3 {
                        write!(out, "{:>16}", matrix_cell(matrix.entries[i][j])).unwrap();
                    }
                    out.push('\n');
                }
            }
            None => {
                writeln!(out, "  (not enough scored calls)").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Writes all report artifacts into `<run_dir>/report/`.
pub fn write_reports(summary: &RunSummary, run_dir: impl AsRef<Path>) -> Result<(), CampaignError> {
    let dir = run_dir.as_ref().join(REPORT_DIR);
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let files: [(&str, String); 6] = [
        ("accuracy.csv", accuracy_csv(summary)),
        ("accuracy.txt", accuracy_table(summary)),
        ("ratios.csv", ratios_csv(summary)),
        ("ratios.txt", ratios_table(summary)),
        ("correlations.csv", correlations_csv(summary)),
        ("correlations.txt", correlations_table(summary)),
    ];
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CORRELATION_LABELS;

    #[test]
    fn cell_formats_match_the_published_shape() {
        let cell = format_accuracy_cell(0.95, 0.02);
        assert_eq!(cell, "0.95±0.02");
        assert_eq!(format_token_cell(311.2), "(311.2)");
        assert_eq!(format_accuracy_cell(1.0, 0.0), "1.00±0.00");
    }

    #[test]
    fn derived_cell_from_per_hop_values() {
        let (mean, half) = crate::stats::summarize_condition(&[0.93, 0.95, 0.97]).unwrap();
        assert_eq!(format_accuracy_cell(mean, half), "0.95±0.02");
    }

    #[test]
    fn undefined_matrix_entries_render_as_a_dash() {
        assert_eq!(matrix_cell(None), UNDEFINED_MARKER);
        assert_eq!(matrix_cell(Some(0.5773)), "0.577");
        assert_eq!(CORRELATION_LABELS, ["all_steps", "correct_order", "correct_answer"]);
    }
}
