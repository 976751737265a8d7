//! Problem, statement and query types.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::triple::{Polarity, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    /// Ground statement about a named individual ("Alex is a sheep.").
    Fact,
    /// Quantified class-to-class or class-to-property statement
    /// ("Every feline is a snake.").
    Rule,
}

/// One line of a problem. `surface_form` selects the quantifier template
/// used when rendering (see `forge::render`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StatementKind,
    pub subject: String,
    pub predicate: String,
    pub polarity: Polarity,
    pub surface_form: usize,
}

impl Statement {
    pub fn fact(subject: impl Into<String>, predicate: impl Into<String>) -> Statement {
        Statement {
            kind: StatementKind::Fact,
            subject: subject.into(),
            predicate: predicate.into(),
            polarity: Polarity::Positive,
            surface_form: 0,
        }
    }

    pub fn rule(subject: impl Into<String>, predicate: impl Into<String>) -> Statement {
        Statement {
            kind: StatementKind::Rule,
            subject: subject.into(),
            predicate: predicate.into(),
            polarity: Polarity::Positive,
            surface_form: 0,
        }
    }

    pub fn negated(mut self) -> Statement {
        self.polarity = Polarity::Negative;
        self
    }

    pub fn with_surface(mut self, surface_form: usize) -> Statement {
        self.surface_form = surface_form;
        self
    }

    pub fn triple(&self) -> Triple {
        Triple {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            polarity: self.polarity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OntologyMode {
    /// Chain edges drawn from the curated real-world taxonomy.
    TrueWorld,
    /// Chain edges that are false of the real world, so the answer cannot
    /// be recalled from memorised facts.
    FalseWorld,
}

impl fmt::Display for OntologyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OntologyMode::TrueWorld => write!(f, "true_world"),
            OntologyMode::FalseWorld => write!(f, "false_world"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetAnswer {
    True,
    False,
    /// Picked pseudo-randomly from the seed with expectation 0.5.
    Balanced,
}

/// A generated (or transcribed) steamroller problem. Statement order is
/// part of the problem identity: rules come first with distractors
/// interleaved at seeded positions, facts last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub statements: Vec<Statement>,
    pub query: Statement,
    pub hops: u32,
    pub ontology_mode: OntologyMode,
    pub distractor_count: u32,
    pub gold_answer: bool,
    pub seed: u64,
}

impl Problem {
    /// The individual the query is about.
    pub fn individual(&self) -> &str {
        &self.query.subject
    }

    pub fn facts(&self) -> impl Iterator<Item = &Statement> {
        self.statements
            .iter()
            .filter(|s| s.kind == StatementKind::Fact)
    }

    pub fn rules(&self) -> impl Iterator<Item = &Statement> {
        self.statements
            .iter()
            .filter(|s| s.kind == StatementKind::Rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statement_to_triple_carries_polarity() {
        let s = Statement::rule("dog", "luminous").negated();
        assert_eq!(s.triple(), Triple::negative("dog", "luminous"));
    }

    #[test]
    fn serde_round_trip() {
        let p = Problem {
            id: "t".into(),
            statements: vec![Statement::fact("alex", "sheep")],
            query: Statement::fact("alex", "sheep"),
            hops: 1,
            ontology_mode: OntologyMode::FalseWorld,
            distractor_count: 0,
            gold_answer: true,
            seed: 7,
        };
        let json = serde_json::to_string(&p).unwrap();
        let back: Problem = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
