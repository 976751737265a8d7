//! Campaign execution: deterministic problem generation, a bounded
//! worker pool per provider, and a single ordered writer.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Arc, Mutex};

use super::config::{io_err, CampaignConfig, CampaignError, ClockKind};
use super::record::{append_record, read_records, CallRecord, RecordKey, RECORD_SCHEMA};
use super::{CONFIG_FILE, LEXICON_FILE, RECORDS_FILE, TEMPLATES_DIR};
use crate::extract::ResponseParser;
use crate::fidelity;
use crate::forge::{generate_problem, render_problem, RenderedProblem};
use crate::lexicon::Lexicon;
use crate::oracle::TraceSet;
use crate::problem::Problem;
use crate::prompt::{sha256_hex, PromptKit, Strategy};
use crate::provider::scripted::splitmix64;
use crate::provider::{CallContext, Clock, CompletionStatus, LogicalClock, Provider, SystemClock};

/// Seed for the problem in cell slot (hop, index). Strategy and provider
/// are deliberately absent: every condition sees the same problems.
pub fn cell_seed(master_seed: u64, hop: u32, index: u32) -> u64 {
    splitmix64(master_seed ^ splitmix64(((hop as u64) << 32) | index as u64))
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub records_written: usize,
    pub records_skipped: usize,
}

struct ProblemBundle {
    problem: Problem,
    rendered: RenderedProblem,
    golden: TraceSet,
}

/// One problem per (hop, index) slot, shared by all strategies and
/// providers.
fn generate_bundles(
    config: &CampaignConfig,
    lexicon: &Lexicon,
) -> Result<Vec<Vec<ProblemBundle>>, CampaignError> {
    let mut per_hop = Vec::with_capacity(config.hops.len());
    for &hop in &config.hops {
        let mut bundles = Vec::with_capacity(config.calls_per_cell as usize);
        for index in 0..config.calls_per_cell {
            let seed = cell_seed(config.master_seed, hop, index);
            let problem = generate_problem(
                lexicon,
                seed,
                hop,
                config.generation.ontology_mode,
                config.generation.distractor_count,
                config.generation.target_answer,
            )?;
            let rendered = render_problem(lexicon, &problem)?;
            let golden = TraceSet::compute(&problem);
            bundles.push(ProblemBundle {
                problem,
                rendered,
                golden,
            });
        }
        per_hop.push(bundles);
    }
    Ok(per_hop)
}

struct Job {
    seq: usize,
    strategy: Strategy,
    hop: u32,
    hop_slot: usize,
    index: u32,
}

/// Runs (or resumes) a campaign into `out_dir`. Existing records are kept
/// and their cells skipped; on a clean directory the full
/// providers x strategies x hops x calls grid is executed.
pub fn run_campaign(config: &CampaignConfig, out_dir: &Path) -> Result<RunOutcome, CampaignError> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;

    // pin run inputs for audit: config, templates with digests, lexicon
    let config_text = toml::to_string_pretty(config)?;
    std::fs::write(out_dir.join(CONFIG_FILE), config_text)
        .map_err(|e| io_err(&out_dir.join(CONFIG_FILE), e))?;
    let kit = Arc::new(config.prompt_kit()?);
    kit.write_to_dir(out_dir.join(TEMPLATES_DIR))
        .map_err(|e| io_err(&out_dir.join(TEMPLATES_DIR), e))?;
    let lexicon = Arc::new(config.lexicon()?);
    let lexicon_src = match &config.generation.lexicon {
        Some(path) => std::fs::read_to_string(path).map_err(|e| io_err(path, e))?,
        None => include_str!("../data/lexicon_default.txt").to_string(),
    };
    std::fs::write(out_dir.join(LEXICON_FILE), lexicon_src)
        .map_err(|e| io_err(&out_dir.join(LEXICON_FILE), e))?;

    let records_path = out_dir.join(RECORDS_FILE);
    let existing: HashSet<RecordKey> = if records_path.exists() {
        read_records(&records_path)?
            .into_iter()
            .map(|r| r.key())
            .collect()
    } else {
        HashSet::new()
    };
    let records_skipped = existing.len();

    let clock: Arc<dyn Clock> = match config.clock_kind() {
        ClockKind::Logical => Arc::new(LogicalClock::new()),
        ClockKind::System => Arc::new(SystemClock),
    };

    let bundles = Arc::new(generate_bundles(config, &lexicon)?);

    let mut out = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&records_path)
        .map_err(|e| io_err(&records_path, e))?;

    let mut records_written = 0;
    for provider_config in &config.providers {
        let provider: Arc<dyn Provider> =
            Arc::from(provider_config.build(lexicon.clone(), clock.clone())?);

        // deterministic job order: strategy-major, then hop, then index
        let mut jobs = Vec::new();
        for &strategy in &config.strategies {
            for (hop_slot, &hop) in config.hops.iter().enumerate() {
                for index in 0..config.calls_per_cell {
                    let key = (provider_config.name.clone(), strategy, hop, index);
                    if existing.contains(&key) {
                        continue;
                    }
                    jobs.push(Job {
                        seq: jobs.len(),
                        strategy,
                        hop,
                        hop_slot,
                        index,
                    });
                }
            }
        }
        if jobs.is_empty() {
            continue;
        }

        let job_count = jobs.len();
        let workers = provider_config.parallelism.min(job_count).max(1);
        let job_rx = {
            let (tx, rx) = mpsc::channel::<Job>();
            for job in jobs {
                tx.send(job).expect("queue open");
            }
            Arc::new(Mutex::new(rx))
        };
        let (result_tx, result_rx) = mpsc::channel::<(usize, CallRecord)>();

        std::thread::scope(|scope| -> Result<(), CampaignError> {
            for _ in 0..workers {
                let job_rx = job_rx.clone();
                let result_tx = result_tx.clone();
                let provider = provider.clone();
                let bundles = bundles.clone();
                let lexicon = lexicon.clone();
                let clock = clock.clone();
                let provider_name = provider_config.name.clone();
                let token_threshold = config.token_threshold;
                let comparison_mode = config.comparison_mode;
                scope.spawn(move || {
                    loop {
                        let job = match job_rx.lock().expect("job queue").try_recv() {
                            Ok(job) => job,
                            Err(_) => break,
                        };
                        let record = execute_job(
                            &job,
                            &provider_name,
                            provider.as_ref(),
                            &bundles,
                            &lexicon,
                            clock.as_ref(),
                            token_threshold,
                            comparison_mode,
                        );
                        if result_tx.send((job.seq, record)).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(result_tx);

            // single writer, records flushed in job order
            let mut pending = std::collections::BTreeMap::new();
            let mut next_seq = 0usize;
            for (seq, record) in result_rx.iter() {
                pending.insert(seq, record);
                while let Some(record) = pending.remove(&next_seq) {
                    append_record(&mut out, &record).map_err(|e| io_err(&records_path, e))?;
                    next_seq += 1;
                    records_written += 1;
                }
            }
            debug_assert_eq!(next_seq, job_count);
            Ok(())
        })?;
        out.flush().map_err(|e| io_err(&records_path, e))?;
    }

    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        records_written,
        records_skipped,
    })
}

#[allow(clippy::too_many_arguments)]
fn execute_job(
    job: &Job,
    provider_name: &str,
    provider: &dyn Provider,
    bundles: &[Vec<ProblemBundle>],
    lexicon: &Lexicon,
    clock: &dyn Clock,
    token_threshold: u32,
    comparison_mode: fidelity::ComparisonMode,
) -> CallRecord {
    let bundle = &bundles[job.hop_slot][job.index as usize];
    let prompt = PromptKit::builtin()
        .build_prompt(job.strategy, &bundle.problem.id, &bundle.rendered)
        .expect("builtin templates validated at startup");

    let started_ms = clock.now_ms();
    let completion = provider.complete(&CallContext {
        prompt: &prompt,
        problem: &bundle.problem,
        golden: &bundle.golden,
    });
    let finished_ms = clock.now_ms();

    let parser = ResponseParser::new(lexicon);
    let parsed = parser.parse(&completion.text, bundle.problem.individual());
    let golden = bundle.golden.get(job.strategy.grading_trace());
    let flags = match completion.status {
        CompletionStatus::Ok => fidelity::classify(
            &parsed,
            golden,
            bundle.problem.gold_answer,
            completion.completion_tokens,
            token_threshold,
            comparison_mode,
        ),
        CompletionStatus::Failed { .. } => fidelity::EvalFlags::default(),
    };

    CallRecord {
        schema: RECORD_SCHEMA,
        provider: provider_name.to_string(),
        strategy: job.strategy,
        hop: job.hop,
        index: job.index,
        problem: bundle.problem.clone(),
        gold_answer: bundle.problem.gold_answer,
        prompt_digest: sha256_hex(&prompt.text),
        completion,
        parsed,
        flags,
        started_ms,
        finished_ms,
    }
}

/// Emits the generated problems and their golden traces as line-
/// delimited records (the `gen` subcommand).
pub fn write_problem_set(
    config: &CampaignConfig,
    out: &mut impl Write,
) -> Result<usize, CampaignError> {
    let lexicon = config.lexicon()?;
    let bundles = generate_bundles(config, &lexicon)?;
    let mut count = 0;
    for per_hop in &bundles {
        for bundle in per_hop {
            let line = serde_json::json!({
                "problem": bundle.problem,
                "question": bundle.rendered.question,
                "query": bundle.rendered.query,
                "verdict": bundle.golden.verdict,
                "traces": {
                    "bottom_up": bundle.golden.bottom_up,
                    "top_down": bundle.golden.top_down,
                    "magic_set": bundle.golden.magic_set,
                },
            });
            out.write_all(line.to_string().as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| CampaignError::Record {
                    path: "problem set".into(),
                    reason: e.to_string(),
                })?;
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_are_distinct_and_stable() {
        let mut seen = HashSet::new();
        for hop in 1..=3u32 {
            for index in 0..100u32 {
                assert!(seen.insert(cell_seed(42, hop, index)));
            }
        }
        assert_eq!(cell_seed(42, 1, 0), cell_seed(42, 1, 0));
        assert_ne!(cell_seed(42, 1, 0), cell_seed(43, 1, 0));
    }
}
