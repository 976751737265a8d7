//! Idempotent re-scoring of a run directory into summaries.
//!
//! Flags are recomputed from the persisted raw text, never trusted from
//! the records, so scoring logic can change after the calls were made.
//! Scoring the same run twice yields byte-identical summaries.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use super::config::{io_err, CampaignConfig, CampaignError};
use super::record::{read_records, CallRecord};
use super::{CONFIG_FILE, RECORDS_FILE};
use crate::extract::ResponseParser;
use crate::fidelity::{classify, ComparisonMode, EvalFlags};
use crate::oracle::TraceSet;
use crate::prompt::Strategy;
use crate::stats::{
    accuracy, binomial_baseline, mean_half_range, phi_matrix, token_stats, Baseline,
    ConditionSummary, CorrelationMatrix, RatioMetric, RatioSummary, ScoredCall,
};

pub const SUMMARY_FILE: &str = "summaries.json";

pub const STD_CONVENTION: &str = "population standard deviation (divide by N)";
pub const CORRELATION_KIND: &str = "phi coefficient (product-moment over binary indicators)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRatios {
    pub strategy: Strategy,
    pub has_reasoning: RatioSummary,
    pub all_steps: RatioSummary,
    pub faithful_given_all_steps: RatioSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderSummary {
    pub provider: String,
    pub conditions: Vec<ConditionSummary>,
    pub ratios: Vec<StrategyRatios>,
    /// Pooled over the three instructed-strategy conditions; absent when
    /// fewer than two scored calls exist.
    pub correlations: Option<CorrelationMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: u32,
    pub master_seed: u64,
    pub hops: Vec<u32>,
    pub calls_per_cell: u32,
    pub token_threshold: u32,
    pub comparison_mode: ComparisonMode,
    pub std_convention: String,
    pub correlation_kind: String,
    pub baseline: Baseline,
    pub baseline_note: String,
    pub providers: Vec<ProviderSummary>,
}

/// The formula value is reported; the note flags the figure this setup
/// is sometimes quoted with, which does not satisfy the formula.
pub fn baseline_note(baseline: &Baseline) -> String {
    format!(
        "random-guess baseline: mean {:.3}, sigma {:.3} = sqrt(p(1-p)/n) for B({}, {}); \
         note: differs from the 0.042 sigma quoted in earlier reports of this setup, \
         which does not satisfy the formula",
        baseline.mean, baseline.sigma, baseline.n, baseline.p
    )
}

struct Rescored {
    record: CallRecord,
    flags: EvalFlags,
}

/// Re-parses and re-classifies every record, then aggregates.
pub fn score_run(run_dir: impl AsRef<Path>) -> Result<RunSummary, CampaignError> {
    let run_dir = run_dir.as_ref();
    let config = CampaignConfig::load(run_dir.join(CONFIG_FILE))?;
    let records = read_records(run_dir.join(RECORDS_FILE))?;
    if records.is_empty() {
        return Err(CampaignError::EmptyRun(run_dir.display().to_string()));
    }
    let lexicon = config.lexicon()?;
    let parser = ResponseParser::new(&lexicon);

    // trace sets are deterministic from the stored problems; cache per id
    let mut traces: BTreeMap<String, TraceSet> = BTreeMap::new();
    let mut rescored: Vec<Rescored> = Vec::with_capacity(records.len());
    for record in records {
        let golden = traces
            .entry(record.problem.id.clone())
            .or_insert_with(|| TraceSet::compute(&record.problem));
        let parsed = parser.parse(&record.completion.text, record.problem.individual());
        let flags = if record.completion.is_ok() {
            classify(
                &parsed,
                golden.get(record.strategy.grading_trace()),
                record.gold_answer,
                record.completion.completion_tokens,
                config.token_threshold,
                config.comparison_mode,
            )
        } else {
            EvalFlags::default()
        };
        rescored.push(Rescored { record, flags });
    }

    let mut providers: Vec<ProviderSummary> = Vec::new();
    let provider_names: Vec<String> = config.providers.iter().map(|p| p.name.clone()).collect();
    for provider in provider_names {
        let of_provider: Vec<&Rescored> = rescored
            .iter()
            .filter(|r| r.record.provider == provider)
            .collect();
        if of_provider.is_empty() {
            continue;
        }

        let mut conditions = Vec::new();
        let mut ratios = Vec::new();
        for &strategy in &config.strategies {
            let of_strategy: Vec<&Rescored> = of_provider
                .iter()
                .copied()
                .filter(|r| r.record.strategy == strategy)
                .collect();
            if of_strategy.is_empty() {
                continue;
            }
            conditions.push(condition_summary(strategy, &config.hops, &of_strategy));
            ratios.push(strategy_ratios(strategy, &config.hops, &of_strategy));
        }

        // correlations pooled over the instructed-strategy conditions
        let flag_records: Vec<(bool, bool, bool)> = of_provider
            .iter()
            .filter(|r| r.record.strategy.trace_strategy().is_some() && r.record.completion.is_ok())
            .map(|r| (r.flags.all_steps, r.flags.faithful, r.flags.correct))
            .collect();
        let correlations = phi_matrix(&flag_records).ok();

        providers.push(ProviderSummary {
            provider,
            conditions,
            ratios,
            correlations,
        });
    }

    let baseline =
        binomial_baseline(u64::from(config.calls_per_cell), 0.5).expect("valid baseline");
    let note = baseline_note(&baseline);
    Ok(RunSummary {
        schema: 1,
        master_seed: config.master_seed,
        hops: config.hops.clone(),
        calls_per_cell: config.calls_per_cell,
        token_threshold: config.token_threshold,
        comparison_mode: config.comparison_mode,
        std_convention: STD_CONVENTION.into(),
        correlation_kind: CORRELATION_KIND.into(),
        baseline,
        baseline_note: note,
        providers,
    })
}

/// Scores a run directory and writes `summaries.json` into it.
pub fn score_run_to_file(run_dir: impl AsRef<Path>) -> Result<RunSummary, CampaignError> {
    let run_dir = run_dir.as_ref();
    let summary = score_run(run_dir)?;
    let path = run_dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    Ok(summary)
}

pub fn load_summary(run_dir: impl AsRef<Path>) -> Result<RunSummary, CampaignError> {
    let path = run_dir.as_ref().join(SUMMARY_FILE);
    if !path.exists() {
        return Err(CampaignError::MissingSummaries(path.display().to_string()));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CampaignError::Record {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn condition_summary(strategy: Strategy, hops: &[u32], calls: &[&Rescored]) -> ConditionSummary {
    let per_hop_accuracy: Vec<Option<f64>> = hops
        .iter()
        .map(|&hop| {
            let cell: Vec<ScoredCall> = calls
                .iter()
                .filter(|r| r.record.hop == hop)
                .map(|r| ScoredCall {
                    ok: r.record.completion.is_ok(),
                    flags: r.flags,
                })
                .collect();
            accuracy(&cell)
        })
        .collect();
    let defined: Vec<f64> = per_hop_accuracy.iter().flatten().cloned().collect();
    let (mean_accuracy, half_range) = match mean_half_range(&defined) {
        Some((m, h)) => (Some(m), Some(h)),
        None => (None, None),
    };

    let ok_calls: Vec<&Rescored> = calls
        .iter()
        .copied()
        .filter(|r| r.record.completion.is_ok())
        .collect();
    let completion_tokens: Vec<u32> = ok_calls
        .iter()
        .map(|r| r.record.completion.completion_tokens)
        .collect();
    let prompt_tokens: Vec<u32> = ok_calls
        .iter()
        .map(|r| r.record.completion.prompt_tokens)
        .collect();
    let (mean_completion_tokens, completion_token_std) = match token_stats(&completion_tokens) {
        Some((m, s)) => (Some(m), Some(s)),
        None => (None, None),
    };
    let (prompt_token_mean, prompt_token_std) = match token_stats(&prompt_tokens) {
        Some((m, s)) => (Some(m), Some(s)),
        None => (None, None),
    };

    ConditionSummary {
        strategy,
        hops: hops.to_vec(),
        per_hop_accuracy,
        mean_accuracy,
        half_range,
        mean_completion_tokens,
        completion_token_std,
        prompt_token_mean,
        prompt_token_std,
        response_count: ok_calls.len(),
        call_count: calls.len(),
    }
}

fn strategy_ratios(strategy: Strategy, hops: &[u32], calls: &[&Rescored]) -> StrategyRatios {
    let mut has_reasoning_per_hop = Vec::new();
    let mut all_steps_per_hop = Vec::new();
    let mut faithful_per_hop = Vec::new();
    for &hop in hops {
        let ok_cell: Vec<&Rescored> = calls
            .iter()
            .copied()
            .filter(|r| r.record.hop == hop && r.record.completion.is_ok())
            .collect();
        has_reasoning_per_hop.push(ratio(&ok_cell, |f| f.has_reasoning, |_| true));
        all_steps_per_hop.push(ratio(&ok_cell, |f| f.all_steps, |_| true));
        // denominator: calls that showed all required steps
        faithful_per_hop.push(ratio(&ok_cell, |f| f.faithful, |f| f.all_steps));
    }
    StrategyRatios {
        strategy,
        has_reasoning: RatioSummary::from_per_hop(RatioMetric::HasReasoning, &has_reasoning_per_hop),
        all_steps: RatioSummary::from_per_hop(RatioMetric::AllSteps, &all_steps_per_hop),
        faithful_given_all_steps: RatioSummary::from_per_hop(
            RatioMetric::FaithfulGivenAllSteps,
            &faithful_per_hop,
        ),
    }
}

fn ratio<F, D>(calls: &[&Rescored], numerator: F, denominator: D) -> Option<f64>
where
    F: Fn(&EvalFlags) -> bool,
    D: Fn(&EvalFlags) -> bool,
{
    let denom = calls.iter().filter(|r| denominator(&r.flags)).count();
    if denom == 0 {
        return None;
    }
    let num = calls
        .iter()
        .filter(|r| denominator(&r.flags) && numerator(&r.flags))
        .count();
    Some(num as f64 / denom as f64)
}
