//! Line-delimited call records, append-only and resume-tolerant.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::config::CampaignError;
use crate::extract::ParsedResponse;
use crate::fidelity::EvalFlags;
use crate::problem::Problem;
use crate::prompt::Strategy;
use crate::provider::Completion;

pub const RECORD_SCHEMA: u32 = 1;

/// One call: the full problem, what was sent (as a digest), what came
/// back, and how it scored. One record per (provider, strategy, hop,
/// index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub schema: u32,
    pub provider: String,
    pub strategy: Strategy,
    pub hop: u32,
    pub index: u32,
    pub problem: Problem,
    pub gold_answer: bool,
    pub prompt_digest: String,
    pub completion: Completion,
    pub parsed: ParsedResponse,
    pub flags: EvalFlags,
    pub started_ms: u64,
    pub finished_ms: u64,
}

pub type RecordKey = (String, Strategy, u32, u32);

impl CallRecord {
    pub fn key(&self) -> RecordKey {
        (self.provider.clone(), self.strategy, self.hop, self.index)
    }
}

pub fn append_record(out: &mut impl Write, record: &CallRecord) -> std::io::Result<()> {
    let line = serde_json::to_string(record).expect("record serializes");
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")
}

/// Reads a records file. A malformed or unterminated final line (the
/// footprint of a killed run) is dropped; a malformed line anywhere else
/// is an error.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<CallRecord>, CampaignError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| super::config::io_err(path, e))?;
    let reader = BufReader::new(file);
    let lines: Vec<String> = reader
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| super::config::io_err(path, e))?;
    let mut records = Vec::with_capacity(lines.len());
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CallRecord>(line) {
            Ok(record) => records.push(record),
            Err(e) if i == last => {
                // torn tail from an interrupted writer; the resume pass
                // will redo this call
                let _ = e;
            }
            Err(e) => {
                return Err(CampaignError::Record {
                    path: path.display().to_string(),
                    reason: format!("line {}: {e}", i + 1),
                });
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{OntologyMode, Statement};
    use crate::triple::Triple;

    fn record(index: u32) -> CallRecord {
        CallRecord {
            schema: RECORD_SCHEMA,
            provider: "p".into(),
            strategy: Strategy::Normal,
            hop: 1,
            index,
            problem: Problem {
                id: format!("t{index}"),
                statements: vec![Statement::fact("alex", "sheep")],
                query: Statement::fact("alex", "sheep"),
                hops: 1,
                ontology_mode: OntologyMode::FalseWorld,
                distractor_count: 0,
                gold_answer: true,
                seed: index as u64,
            },
            gold_answer: true,
            prompt_digest: "d".into(),
            completion: Completion::ok("True".into(), 10, 1),
            parsed: ParsedResponse {
                verdict: true,
                verdict_explicit: true,
                triples: vec![Triple::positive("alex", "sheep")],
                sentence_count: 1,
                skipped_sentences: 0,
                unknown_lemmas: vec![],
            },
            flags: EvalFlags::default(),
            started_ms: 0,
            finished_ms: 1,
        }
    }

    #[test]
    fn torn_tail_is_dropped_and_resumable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let mut buf = Vec::new();
        append_record(&mut buf, &record(0)).unwrap();
        append_record(&mut buf, &record(1)).unwrap();
        // simulate a kill mid-write
        let full = String::from_utf8(buf).unwrap();
        let torn = &full[..full.len() - 25];
        std::fs::write(&path, torn).unwrap();

        let records = read_records(&path).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].index, 0);
    }

    #[test]
    fn malformed_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let mut buf = Vec::new();
        append_record(&mut buf, &record(0)).unwrap();
        buf.extend_from_slice(b"not json\n");
        append_record(&mut buf, &record(1)).unwrap();
        std::fs::write(&path, &buf).unwrap();
        assert!(read_records(&path).is_err());
    }

    #[test]
    fn record_round_trips() {
        let mut buf = Vec::new();
        append_record(&mut buf, &record(7)).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let back: CallRecord = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back, record(7));
        assert_eq!(back.key(), ("p".to_string(), Strategy::Normal, 1, 7));
    }
}
