//! Canonical semantic triples.
//!
//! Every fact, rule, subgoal and derived conclusion in the pipeline is
//! normalised to a `(subject, predicate, polarity)` triple over lowercase
//! singular lemmas. Comparisons between model output and golden proofs
//! happen on these values only.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn is_positive(self) -> bool {
        self == Polarity::Positive
    }

    pub fn negate(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Positive => write!(f, "+"),
            Polarity::Negative => write!(f, "-"),
        }
    }
}

/// A `(subject, predicate, polarity)` unit. Subjects and predicates are
/// canonical lowercase singular lemmas; see `extract::canonicalize` for
/// how surface phrases are folded onto them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub polarity: Polarity,
}

impl Triple {
    pub fn positive(subject: impl Into<String>, predicate: impl Into<String>) -> Triple {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(subject: impl Into<String>, predicate: impl Into<String>) -> Triple {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            polarity: Polarity::Negative,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.polarity)
    }
}

/// Collapses exact adjacent duplicates, preserving first-occurrence order.
/// Both golden traces and parsed responses are compared in this form.
pub fn collapse_adjacent(triples: &[Triple]) -> Vec<Triple> {
    let mut out: Vec<Triple> = Vec::with_capacity(triples.len());
    for t in triples {
        if out.last() != Some(t) {
            out.push(t.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_only_touches_adjacent_repeats() {
        let a = Triple::positive("alex", "sheep");
        let b = Triple::positive("sheep", "feline");
        let seq = vec![a.clone(), a.clone(), b.clone(), a.clone()];
        assert_eq!(collapse_adjacent(&seq), vec![a.clone(), b, a]);
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(Triple::negative("dog", "luminous").to_string(), "(dog, luminous, -)");
    }
}
