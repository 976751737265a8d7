//! Hand-built sample problems used by tests, docs and the CLI demo.

use crate::problem::{OntologyMode, Problem, Statement};

/// The classic 17-statement false-ontology problem with 13 distractors:
/// a sheep-to-luminous chain about Alex, three hops deep.
pub fn classic_problem() -> Problem {
    let statements = vec![
        Statement::rule("sheep", "sunny").with_surface(1),
        Statement::rule("sheep", "feline").with_surface(1),
        Statement::rule("sheep", "mammal").with_surface(2),
        Statement::rule("feline", "aggressive").with_surface(2),
        Statement::rule("feline", "snake").with_surface(0),
        Statement::rule("feline", "carnivore").with_surface(2),
        Statement::rule("snake", "luminous").with_surface(1),
        Statement::rule("snake", "cat").with_surface(2),
        Statement::rule("dog", "luminous").negated().with_surface(0),
        Statement::rule("snake", "animal").with_surface(1),
        Statement::rule("animal", "fast").with_surface(2),
        Statement::rule("carnivore", "opaque").with_surface(2),
        Statement::rule("mammal", "floral").with_surface(1),
        Statement::rule("vertebrate", "feisty").negated().with_surface(1),
        Statement::rule("vertebrate", "cow").with_surface(1),
        Statement::fact("alex", "sheep"),
        Statement::fact("alex", "vertebrate"),
    ];
    Problem {
        id: "classic".into(),
        statements,
        query: Statement::fact("alex", "luminous"),
        hops: 3,
        ontology_mode: OntologyMode::FalseWorld,
        distractor_count: 13,
        gold_answer: true,
        seed: 0,
    }
}

/// Two-hop true-ontology example: Whiskers the cat is an animal.
pub fn whiskers_problem() -> Problem {
    Problem {
        id: "whiskers".into(),
        statements: vec![
            Statement::rule("mammal", "animal"),
            Statement::rule("cat", "mammal").with_surface(1),
            Statement::fact("whiskers", "cat"),
        ],
        query: Statement::fact("whiskers", "animal"),
        hops: 2,
        ontology_mode: OntologyMode::TrueWorld,
        distractor_count: 0,
        gold_answer: true,
        seed: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn classic_problem_is_gold_true_at_three_hops() {
        let p = classic_problem();
        assert!(oracle::answer_query(&p));
        assert_eq!(oracle::derivation_depth(&p, &p.query.triple()), Some(3));
        assert_eq!(p.statements.len(), 17);
        assert_eq!(p.facts().count(), 2);
    }
}
