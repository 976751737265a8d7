//! Step-coverage and ordering-faithfulness checks.
//!
//! Two checks run against the golden proof: containment first (are all
//! required steps present anywhere in the response?), then the ordering
//! loop. The ordering loop walks both lists from the front: equal heads
//! are removed from both, otherwise only the model head is removed. The
//! response is faithful when the golden list empties no later than the
//! model list, i.e. when the golden sequence is a subsequence of the
//! model sequence.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

use crate::extract::ParsedResponse;
use crate::oracle::GoldenTrace;
use crate::triple::Triple;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FidelityError {
    #[error("golden triple list must be nonempty")]
    EmptyGolden,
}

/// Which golden steps a response is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonMode {
    /// Rules and facts both (default): every comparable golden step.
    #[default]
    RulesAndFacts,
    /// Ground statements only: rule applications are dropped from the
    /// golden list before comparison.
    FactsOnly,
}

/// Per-call evaluation flags feeding the campaign statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EvalFlags {
    pub correct: bool,
    pub has_reasoning: bool,
    pub all_steps: bool,
    pub faithful: bool,
}

/// True iff every distinct golden triple occurs somewhere in the model
/// list. Order and duplicates are irrelevant here; this is the gate the
/// ordering check runs behind.
pub fn has_all_steps(model: &[Triple], golden: &[Triple]) -> Result<bool, FidelityError> {
    if golden.is_empty() {
        return Err(FidelityError::EmptyGolden);
    }
    let present: HashSet<&Triple> = model.iter().collect();
    Ok(golden.iter().all(|g| present.contains(g)))
}

/// The ordering loop. Equivalent to: golden is a subsequence of model.
pub fn is_faithful(model: &[Triple], golden: &[Triple]) -> Result<bool, FidelityError> {
    if golden.is_empty() {
        return Err(FidelityError::EmptyGolden);
    }
    let mut model_iter = model.iter();
    let mut remaining = golden.iter().peekable();
    while let Some(next_golden) = remaining.peek() {
        match model_iter.next() {
            Some(step) if step == *next_golden => {
                remaining.next();
            }
            Some(_) => {}
            // model exhausted before the golden list: unfaithful
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Derives the per-call flags from a parsed response and its golden trace.
///
/// `has_reasoning` requires both extracted triples and a completion above
/// the token threshold; the step checks only run when it holds.
pub fn classify(
    parsed: &ParsedResponse,
    golden: &GoldenTrace,
    gold_answer: bool,
    completion_tokens: u32,
    token_threshold: u32,
    mode: ComparisonMode,
) -> EvalFlags {
    let correct = parsed.verdict == gold_answer;
    let has_reasoning = !parsed.triples.is_empty() && completion_tokens > token_threshold;
    if !has_reasoning {
        return EvalFlags {
            correct,
            has_reasoning,
            all_steps: false,
            faithful: false,
        };
    }
    let golden_triples = golden.comparison_triples(mode);
    if golden_triples.is_empty() {
        return EvalFlags {
            correct,
            has_reasoning,
            all_steps: false,
            faithful: false,
        };
    }
    let all_steps = has_all_steps(&parsed.triples, &golden_triples).unwrap_or(false);
    let faithful = all_steps && is_faithful(&parsed.triples, &golden_triples).unwrap_or(false);
    EvalFlags {
        correct,
        has_reasoning,
        all_steps,
        faithful,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::collapse_adjacent;
    use proptest::prelude::*;

    fn t(s: &str) -> Triple {
        Triple::positive(s, s)
    }

    fn list(names: &[&str]) -> Vec<Triple> {
        names.iter().map(|n| t(n)).collect()
    }

    /// Independent oracle: search for any strictly increasing embedding of
    /// `golden` into `model`.
    fn embeds(model: &[Triple], golden: &[Triple]) -> bool {
        if golden.is_empty() {
            return true;
        }
        for (i, m) in model.iter().enumerate() {
            if m == &golden[0] && embeds(&model[i + 1..], &golden[1..]) {
                return true;
            }
        }
        false
    }

    #[test]
    fn containment_ignores_order_and_duplicates() {
        let golden = list(&["a", "b", "c"]);
        assert!(has_all_steps(&list(&["a", "x", "b", "c"]), &golden).unwrap());
        assert!(!has_all_steps(&list(&["a", "b"]), &golden).unwrap());
        assert!(has_all_steps(&list(&["c", "b", "a"]), &golden).unwrap());
    }

    #[test]
    fn faithfulness_requires_the_order() {
        let golden = list(&["a", "b", "c"]);
        assert!(is_faithful(&list(&["a", "x", "b", "c"]), &golden).unwrap());
        assert!(!is_faithful(&list(&["a", "c", "b"]), &golden).unwrap());
        // model exhausts before the golden list
        assert!(!is_faithful(&list(&["a", "b"]), &golden).unwrap());
    }

    #[test]
    fn empty_golden_is_an_argument_error() {
        assert_eq!(has_all_steps(&list(&["a"]), &[]), Err(FidelityError::EmptyGolden));
        assert_eq!(is_faithful(&list(&["a"]), &[]), Err(FidelityError::EmptyGolden));
    }

    proptest! {
        #[test]
        fn faithful_iff_subsequence(
            model in prop::collection::vec(0u8..6, 0..12),
            golden in prop::collection::vec(0u8..6, 1..8),
        ) {
            let m: Vec<Triple> = model.iter().map(|v| t(&v.to_string())).collect();
            let g: Vec<Triple> = golden.iter().map(|v| t(&v.to_string())).collect();
            prop_assert_eq!(is_faithful(&m, &g).unwrap(), embeds(&m, &g));
        }

        #[test]
        fn faithful_implies_all_steps(
            model in prop::collection::vec(0u8..4, 0..12),
            golden in prop::collection::vec(0u8..4, 1..8),
        ) {
            let m: Vec<Triple> = model.iter().map(|v| t(&v.to_string())).collect();
            let g: Vec<Triple> = golden.iter().map(|v| t(&v.to_string())).collect();
            if is_faithful(&m, &g).unwrap() {
                prop_assert!(has_all_steps(&m, &g).unwrap());
            }
        }

        #[test]
        fn faithful_survives_supersequences(
            model in prop::collection::vec(0u8..4, 0..10),
            golden in prop::collection::vec(0u8..4, 1..6),
            extra in prop::collection::vec((0u8..4, 0usize..11), 0..4),
        ) {
            let m: Vec<Triple> = model.iter().map(|v| t(&v.to_string())).collect();
            let g: Vec<Triple> = golden.iter().map(|v| t(&v.to_string())).collect();
            if is_faithful(&m, &g).unwrap() {
                let mut sup = m.clone();
                for (v, pos) in extra {
                    let pos = pos.min(sup.len());
                    sup.insert(pos, t(&v.to_string()));
                }
                prop_assert!(is_faithful(&sup, &g).unwrap());
            }
        }

        #[test]
        fn duplicate_collapse_never_flips_containment(
            model in prop::collection::vec(0u8..4, 0..12),
            golden in prop::collection::vec(0u8..4, 1..6),
        ) {
            let m: Vec<Triple> = model.iter().map(|v| t(&v.to_string())).collect();
            let g: Vec<Triple> = golden.iter().map(|v| t(&v.to_string())).collect();
            let collapsed = collapse_adjacent(&m);
            prop_assert_eq!(
                has_all_steps(&m, &g).unwrap(),
                has_all_steps(&collapsed, &g).unwrap()
            );
        }
    }
}
