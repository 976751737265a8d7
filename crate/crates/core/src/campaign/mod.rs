//! Campaign orchestration: run, persist, resume, score, report.
//!
//! A campaign is strategies x hops x calls per provider. Problems are
//! generated deterministically from the master seed per (hop, index)
//! cell slot, so every strategy and every provider sees the same
//! problems, and an interrupted run resumed later queries exactly the
//! problems it would have queried anyway. Raw response text is always
//! persisted; scoring recomputes parses and flags from it, so grading
//! logic can evolve without re-spending calls.

mod config;
mod record;
mod report;
mod runner;
mod score;

pub use config::{CampaignConfig, CampaignError, ClockKind, GenerationConfig};
pub use record::{read_records, CallRecord, RecordKey, RECORD_SCHEMA};
pub use report::{format_accuracy_cell, format_token_cell, write_reports, UNDEFINED_MARKER};
pub use runner::{cell_seed, run_campaign, write_problem_set, RunOutcome};
pub use score::{
    load_summary, score_run, score_run_to_file, ProviderSummary, RunSummary, StrategyRatios,
    SUMMARY_FILE,
};

/// File names inside a run directory.
pub const RECORDS_FILE: &str = "records.jsonl";
pub const CONFIG_FILE: &str = "campaign.toml";
pub const TEMPLATES_DIR: &str = "templates";
pub const LEXICON_FILE: &str = "lexicon.txt";
pub const REPORT_DIR: &str = "report";
