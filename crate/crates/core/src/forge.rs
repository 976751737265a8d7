//! Problem generation and controlled-natural-language rendering.
//!
//! Generation is deterministic: the same `(seed, hops, mode, distractors,
//! target)` always yields the same problem. The layout mirrors the
//! classic presentation: rules first with distractors interleaved at
//! seeded positions, facts last, one query about a named individual.
//!
//! Structural guarantees, enforced by construction and checked in tests:
//! exactly one base fact grounds the gold chain; every non-query lemma is
//! the head of at most one rule, so derivations are unique; negated rules
//! only occur as terminal edges; for gold-false problems the query
//! predicate is unreachable from every fact, making the verdict false
//! under default negation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::problem::{OntologyMode, Problem, Statement, StatementKind, TargetAnswer};
use crate::triple::Polarity;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("hops must be at least 1")]
    InvalidHops,
    #[error("lexicon pool exhausted: {pool} (chain length plus distractors exceed the vocabulary)")]
    LexiconExhausted { pool: &'static str },
    #[error("no taxonomy path of length {hops} in the true-edge table")]
    NoTaxonomyPath { hops: u32 },
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("lemma {0:?} is neither a class noun nor an adjective in the lexicon")]
    UnknownLemma(String),
}

/// Question text and query text, the two slots every prompt template
/// fills.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedProblem {
    pub question: String,
    pub query: String,
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn display_individual(lexicon: &Lexicon, lemma: &str) -> String {
    lexicon
        .display_name(lemma)
        .map(str::to_string)
        .unwrap_or_else(|| capitalize(lemma))
}

/// "a sheep" / "an animal" / bare adjective.
fn noun_phrase(lexicon: &Lexicon, lemma: &str) -> Result<String, RenderError> {
    if let Some(article) = lexicon.article(lemma) {
        Ok(format!("{article} {lemma}"))
    } else if lexicon.is_adjective(lemma) {
        Ok(lemma.to_string())
    } else {
        Err(RenderError::UnknownLemma(lemma.to_string()))
    }
}

/// Plural predicate for the bare-plural template: "mammals" / adjective
/// unchanged.
fn plural_phrase(lexicon: &Lexicon, lemma: &str) -> Result<String, RenderError> {
    if let Some(plural) = lexicon.plural(lemma) {
        Ok(plural.to_string())
    } else if lexicon.is_adjective(lemma) {
        Ok(lemma.to_string())
    } else {
        Err(RenderError::UnknownLemma(lemma.to_string()))
    }
}

fn negation(polarity: Polarity) -> &'static str {
    match polarity {
        Polarity::Positive => "",
        Polarity::Negative => "not ",
    }
}

/// Renders one quantified rule sentence. Templates: 0 "Every X is ...",
/// 1 "Each X is ...", 2 "Xs are ...".
pub fn render_rule_sentence(
    lexicon: &Lexicon,
    subject: &str,
    predicate: &str,
    polarity: Polarity,
    surface_form: usize,
) -> Result<String, RenderError> {
    let not = negation(polarity);
    Ok(match surface_form {
        0 => format!("Every {subject} is {not}{}.", noun_phrase(lexicon, predicate)?),
        1 => format!("Each {subject} is {not}{}.", noun_phrase(lexicon, predicate)?),
        _ => {
            let subject_plural = lexicon
                .plural(subject)
                .ok_or_else(|| RenderError::UnknownLemma(subject.to_string()))?;
            let are_not = if not.is_empty() { "" } else { "not " };
            format!(
                "{} are {are_not}{}.",
                capitalize(subject_plural),
                plural_phrase(lexicon, predicate)?
            )
        }
    })
}

/// Renders a ground sentence about an individual: "Alex is a sheep." /
/// "Alex is not luminous."
pub fn render_fact_sentence(
    lexicon: &Lexicon,
    subject: &str,
    predicate: &str,
    polarity: Polarity,
) -> Result<String, RenderError> {
    Ok(format!(
        "{} is {}{}.",
        display_individual(lexicon, subject),
        negation(polarity),
        noun_phrase(lexicon, predicate)?
    ))
}

pub fn render_statement(lexicon: &Lexicon, stmt: &Statement) -> Result<String, RenderError> {
    match stmt.kind {
        StatementKind::Rule => render_rule_sentence(
            lexicon,
            &stmt.subject,
            &stmt.predicate,
            stmt.polarity,
            stmt.surface_form,
        ),
        StatementKind::Fact => {
            render_fact_sentence(lexicon, &stmt.subject, &stmt.predicate, stmt.polarity)
        }
    }
}

pub fn render_query(lexicon: &Lexicon, query: &Statement) -> Result<String, RenderError> {
    Ok(format!(
        "True or false: {} is {}{}.",
        display_individual(lexicon, &query.subject),
        negation(query.polarity),
        noun_phrase(lexicon, &query.predicate)?
    ))
}

/// One sentence per statement in statement order, plus the query line.
pub fn render_problem(
    lexicon: &Lexicon,
    problem: &Problem,
) -> Result<RenderedProblem, RenderError> {
    let sentences: Vec<String> = problem
        .statements
        .iter()
        .map(|s| render_statement(lexicon, s))
        .collect::<Result<_, _>>()?;
    Ok(RenderedProblem {
        question: sentences.join(" "),
        query: render_query(lexicon, &problem.query)?,
    })
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Unused-lemma pools; draws pop from the back of a seeded shuffle.
struct Pools {
    classes: Vec<String>,
    adjectives: Vec<String>,
}

impl Pools {
    fn new(lexicon: &Lexicon, rng: &mut ChaCha8Rng) -> Pools {
        let mut classes: Vec<String> = lexicon
            .class_nouns()
            .iter()
            .map(|n| n.lemma.clone())
            .collect();
        let mut adjectives: Vec<String> = lexicon.adjectives().to_vec();
        classes.shuffle(rng);
        adjectives.shuffle(rng);
        Pools {
            classes,
            adjectives,
        }
    }

    fn pop_class(&mut self) -> Result<String, GenerateError> {
        self.classes
            .pop()
            .ok_or(GenerateError::LexiconExhausted { pool: "class_nouns" })
    }

    /// Pops the first class (from the draw side) satisfying `keep`.
    fn pop_class_where(
        &mut self,
        keep: impl Fn(&str) -> bool,
    ) -> Result<String, GenerateError> {
        match self.classes.iter().rposition(|c| keep(c)) {
            Some(i) => Ok(self.classes.remove(i)),
            None => Err(GenerateError::LexiconExhausted { pool: "class_nouns" }),
        }
    }

    fn pop_adjective_where(
        &mut self,
        keep: impl Fn(&str) -> bool,
    ) -> Result<String, GenerateError> {
        match self.adjectives.iter().rposition(|a| keep(a)) {
            Some(i) => Ok(self.adjectives.remove(i)),
            None => Err(GenerateError::LexiconExhausted { pool: "adjectives" }),
        }
    }

    /// Removes a lemma from whichever pool still holds it.
    fn mark_used(&mut self, lemma: &str) {
        if let Some(i) = self.classes.iter().position(|c| c == lemma) {
            self.classes.remove(i);
        }
        if let Some(i) = self.adjectives.iter().position(|a| a == lemma) {
            self.adjectives.remove(i);
        }
    }
}

fn rule_surface(rng: &mut ChaCha8Rng, polarity: Polarity) -> usize {
    match polarity {
        // the bare-plural template reads awkwardly when negated
        Polarity::Negative => rng.gen_range(0..2),
        Polarity::Positive => rng.gen_range(0..3),
    }
}

/// Enumerates all simple paths of exactly `hops` edges in the true-edge
/// table, node and edge order following the lexicon.
fn true_world_paths(lexicon: &Lexicon, hops: u32) -> Vec<Vec<String>> {
    let mut paths = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    fn dfs(
        lexicon: &Lexicon,
        node: &str,
        remaining: u32,
        stack: &mut Vec<String>,
        paths: &mut Vec<Vec<String>>,
    ) {
        if remaining == 0 {
            paths.push(stack.clone());
            return;
        }
        for (src, dst) in lexicon.true_edges() {
            if src == node && !stack.iter().any(|n| n == dst) {
                stack.push(dst.clone());
                dfs(lexicon, dst, remaining - 1, stack, paths);
                stack.pop();
            }
        }
    }
    for noun in lexicon.class_nouns() {
        stack.push(noun.lemma.clone());
        dfs(lexicon, &noun.lemma, hops, &mut stack, &mut paths);
        stack.pop();
    }
    paths
}

struct DistractorState {
    /// Class lemmas usable as rule subjects, with a reachability flag.
    sources: Vec<(String, bool)>,
    rules: Vec<Statement>,
    fact: Option<Statement>,
    /// Deepest ungrounded class above the query predicate (false
    /// problems only).
    ghost_head: Option<String>,
    has_negated_query_rule: bool,
}

/// Deterministic problem generator.
pub fn generate_problem(
    lexicon: &Lexicon,
    seed: u64,
    hops: u32,
    ontology_mode: OntologyMode,
    distractor_count: u32,
    target_answer: TargetAnswer,
) -> Result<Problem, GenerateError> {
    if hops < 1 {
        return Err(GenerateError::InvalidHops);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let gold_answer = match target_answer {
        TargetAnswer::True => true,
        TargetAnswer::False => false,
        TargetAnswer::Balanced => rng.gen_bool(0.5),
    };

    if lexicon.individual_names().is_empty() {
        return Err(GenerateError::LexiconExhausted { pool: "individual_names" });
    }
    let individual = lexicon.individual_names()
        [rng.gen_range(0..lexicon.individual_names().len())]
    .to_lowercase();

    let mut pools = Pools::new(lexicon, &mut rng);

    // Gold chain: nodes c0..c_hops, edges c_i -> c_{i+1}.
    let chain: Vec<String> = match ontology_mode {
        OntologyMode::TrueWorld => {
            let paths = true_world_paths(lexicon, hops);
            if paths.is_empty() {
                return Err(GenerateError::NoTaxonomyPath { hops });
            }
            let path = paths[rng.gen_range(0..paths.len())].clone();
            for lemma in &path {
                pools.mark_used(lemma);
            }
            path
        }
        OntologyMode::FalseWorld => {
            let mut chain = vec![pools.pop_class()?];
            for i in 1..=hops {
                let prev = chain[(i - 1) as usize].clone();
                let terminal_adjective = i == hops && rng.gen_bool(0.4);
                let next = if terminal_adjective {
                    pools
                        .pop_adjective_where(|a| !lexicon.is_true_edge(&prev, a))
                        .or_else(|_| pools.pop_class_where(|c| !lexicon.is_true_edge(&prev, c)))?
                } else {
                    pools.pop_class_where(|c| !lexicon.is_true_edge(&prev, c))?
                };
                chain.push(next);
            }
            chain
        }
    };

    // Query predicate: chain end when gold-true, a fresh unreachable
    // lemma otherwise.
    let query_predicate = if gold_answer {
        chain[hops as usize].clone()
    } else {
        let want_adjective = rng.gen_bool(0.5) && !pools.adjectives.is_empty();
        if want_adjective {
            pools.pop_adjective_where(|_| true)?
        } else {
            pools.pop_class()?
        }
    };

    // Distractors.
    let mut state = DistractorState {
        sources: chain
            .iter()
            .filter(|l| lexicon.is_class(l))
            .map(|l| (l.clone(), true))
            .collect(),
        rules: Vec::new(),
        fact: None,
        ghost_head: None,
        has_negated_query_rule: false,
    };
    for _ in 0..distractor_count {
        add_distractor(
            lexicon,
            &mut rng,
            &mut pools,
            &mut state,
            ontology_mode,
            gold_answer,
            &individual,
            &query_predicate,
        )?;
    }

    // Assembly: gold rules at seeded sorted positions among the
    // distractor rules, facts last.
    let gold_rules: Vec<Statement> = (0..hops as usize)
        .map(|i| {
            let polarity = Polarity::Positive;
            Statement {
                kind: StatementKind::Rule,
                subject: chain[i].clone(),
                predicate: chain[i + 1].clone(),
                polarity,
                surface_form: rule_surface(&mut rng, polarity),
            }
        })
        .collect();

    let total_rules = gold_rules.len() + state.rules.len();
    let mut gold_positions =
        rand::seq::index::sample(&mut rng, total_rules, gold_rules.len()).into_vec();
    gold_positions.sort_unstable();

    let mut rules = Vec::with_capacity(total_rules);
    let mut gold_iter = gold_rules.into_iter();
    let mut distractor_iter = state.rules.into_iter();
    for pos in 0..total_rules {
        if gold_positions.contains(&pos) {
            rules.push(gold_iter.next().expect("gold rule count matches positions"));
        } else {
            rules.push(distractor_iter.next().expect("distractor rule count"));
        }
    }

    let mut facts = vec![Statement::fact(individual.clone(), chain[0].clone())];
    if let Some(extra) = state.fact {
        facts.push(extra);
        if rng.gen_bool(0.5) {
            facts.swap(0, 1);
        }
    }

    let mut statements = rules;
    statements.extend(facts);

    let mode_tag = match ontology_mode {
        OntologyMode::TrueWorld => "tw",
        OntologyMode::FalseWorld => "fw",
    };
    let problem = Problem {
        id: format!("{mode_tag}-h{hops}-d{distractor_count}-s{seed}"),
        statements,
        query: Statement::fact(individual, query_predicate),
        hops,
        ontology_mode,
        distractor_count,
        gold_answer,
        seed,
    };

    debug_assert_eq!(crate::oracle::answer_query(&problem), gold_answer);
    debug_assert!(
        !gold_answer
            || crate::oracle::derivation_depth(&problem, &problem.query.triple()) == Some(hops)
    );
    Ok(problem)
}

#[derive(Clone, Copy, PartialEq)]
enum DistractorKind {
    Branch,
    NegatedRule,
    NegatedQueryRule,
    Fact,
    Ghost,
}

#[allow(clippy::too_many_arguments)]
fn add_distractor(
    lexicon: &Lexicon,
    rng: &mut ChaCha8Rng,
    pools: &mut Pools,
    state: &mut DistractorState,
    mode: OntologyMode,
    gold_answer: bool,
    individual: &str,
    query_predicate: &str,
) -> Result<(), GenerateError> {
    let mut options: Vec<(DistractorKind, u32)> = Vec::new();
    let fresh_available = !pools.classes.is_empty() || !pools.adjectives.is_empty();
    match mode {
        OntologyMode::FalseWorld => {
            if !state.sources.is_empty() && fresh_available {
                options.push((DistractorKind::Branch, 4));
            }
            if !state.sources.is_empty() && !pools.adjectives.is_empty() {
                options.push((DistractorKind::NegatedRule, 1));
            }
            if gold_answer && !state.has_negated_query_rule && !pools.classes.is_empty() {
                options.push((DistractorKind::NegatedQueryRule, 1));
            }
            if !gold_answer && !pools.classes.is_empty() {
                options.push((DistractorKind::Ghost, 2));
            }
        }
        OntologyMode::TrueWorld => {
            if next_true_edge(lexicon, pools, state, rng, None).is_some() {
                options.push((DistractorKind::Branch, 4));
            }
            if !gold_answer {
                let ghost_target = state
                    .ghost_head
                    .clone()
                    .unwrap_or_else(|| query_predicate.to_string());
                if lexicon
                    .true_edges()
                    .iter()
                    .any(|(s, d)| d == &ghost_target && pools.classes.iter().any(|c| c == s))
                {
                    options.push((DistractorKind::Ghost, 2));
                }
            }
        }
    }
    if state.fact.is_none() && !pools.classes.is_empty() {
        options.push((DistractorKind::Fact, 1));
    }
    if options.is_empty() {
        return Err(GenerateError::LexiconExhausted { pool: "distractors" });
    }

    let total: u32 = options.iter().map(|(_, w)| w).sum();
    let mut pick = rng.gen_range(0..total);
    let kind = options
        .iter()
        .find(|(_, w)| {
            if pick < *w {
                true
            } else {
                pick -= w;
                false
            }
        })
        .expect("weighted pick in range")
        .0;

    match kind {
        DistractorKind::Branch => match mode {
            OntologyMode::FalseWorld => {
                let (src, src_reachable) = state.sources[rng.gen_range(0..state.sources.len())].clone();
                let prefer_adjective = rng.gen_bool(0.5);
                let target = if prefer_adjective && !pools.adjectives.is_empty() {
                    pools.pop_adjective_where(|a| !lexicon.is_true_edge(&src, a))
                } else {
                    pools.pop_class_where(|c| !lexicon.is_true_edge(&src, c))
                }
                .or_else(|_| pools.pop_adjective_where(|a| !lexicon.is_true_edge(&src, a)))?;
                if lexicon.is_class(&target) {
                    state.sources.push((target.clone(), src_reachable));
                }
                let polarity = Polarity::Positive;
                state.rules.push(Statement {
                    kind: StatementKind::Rule,
                    subject: src,
                    predicate: target,
                    polarity,
                    surface_form: rule_surface(rng, polarity),
                });
            }
            OntologyMode::TrueWorld => {
                let (src, dst) = next_true_edge(lexicon, pools, state, rng, None)
                    .ok_or(GenerateError::LexiconExhausted { pool: "true_edges" })?;
                pools.mark_used(&src);
                pools.mark_used(&dst);
                if lexicon.is_class(&dst) {
                    state.sources.push((dst.clone(), false));
                }
                let polarity = Polarity::Positive;
                state.rules.push(Statement {
                    kind: StatementKind::Rule,
                    subject: src,
                    predicate: dst,
                    polarity,
                    surface_form: rule_surface(rng, polarity),
                });
            }
        },
        DistractorKind::NegatedRule => {
            let (src, _) = state.sources[rng.gen_range(0..state.sources.len())].clone();
            let target = pools.pop_adjective_where(|a| !lexicon.is_true_edge(&src, a))?;
            let polarity = Polarity::Negative;
            state.rules.push(Statement {
                kind: StatementKind::Rule,
                subject: src,
                predicate: target,
                polarity,
                surface_form: rule_surface(rng, polarity),
            });
        }
        DistractorKind::NegatedQueryRule => {
            // "Every dog is not luminous": a dead negative edge into the
            // query predicate from an ungrounded class.
            let src = pools.pop_class_where(|c| !lexicon.is_true_edge(c, query_predicate))?;
            state.sources.push((src.clone(), false));
            state.has_negated_query_rule = true;
            let polarity = Polarity::Negative;
            state.rules.push(Statement {
                kind: StatementKind::Rule,
                subject: src,
                predicate: query_predicate.to_string(),
                polarity,
                surface_form: rule_surface(rng, polarity),
            });
        }
        DistractorKind::Fact => {
            let class = pools.pop_class()?;
            state.sources.push((class.clone(), true));
            state.fact = Some(Statement::fact(individual.to_string(), class));
        }
        DistractorKind::Ghost => {
            // An ungrounded rule chain above the (unreachable) query
            // predicate, giving top-down descent something to explore.
            let target = state
                .ghost_head
                .clone()
                .unwrap_or_else(|| query_predicate.to_string());
            let src = match mode {
                OntologyMode::FalseWorld => {
                    pools.pop_class_where(|c| !lexicon.is_true_edge(c, &target))?
                }
                OntologyMode::TrueWorld => {
                    let src = lexicon
                        .true_edges()
                        .iter()
                        .filter(|(s, d)| d == &target && pools.classes.iter().any(|c| c == s))
                        .map(|(s, _)| s.clone())
                        .next()
                        .ok_or(GenerateError::LexiconExhausted { pool: "true_edges" })?;
                    pools.mark_used(&src);
                    src
                }
            };
            state.sources.push((src.clone(), false));
            state.ghost_head = Some(src.clone());
            let polarity = Polarity::Positive;
            state.rules.push(Statement {
                kind: StatementKind::Rule,
                subject: src,
                predicate: target,
                polarity,
                surface_form: rule_surface(rng, polarity),
            });
        }
    }
    Ok(())
}

/// Picks an unused true-table edge, preferring edges attached to a lemma
/// already in play. Returns `None` when the table is exhausted.
fn next_true_edge(
    lexicon: &Lexicon,
    pools: &Pools,
    state: &DistractorState,
    rng: &mut ChaCha8Rng,
    _target: Option<&str>,
) -> Option<(String, String)> {
    let target_unused =
        |dst: &str| pools.classes.iter().any(|c| c == dst) || pools.adjectives.iter().any(|a| a == dst);
    let candidates: Vec<(String, String)> = lexicon
        .true_edges()
        .iter()
        .filter(|(_, dst)| target_unused(dst))
        .cloned()
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let attached: Vec<(String, String)> = candidates
        .iter()
        .filter(|(src, _)| {
            state.sources.iter().any(|(s, _)| s == src) || !target_unused(src)
        })
        .cloned()
        .collect();
    let pool = if attached.is_empty() { &candidates } else { &attached };
    Some(pool[rng.gen_range(0..pool.len())].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::sample;

    fn lex() -> &'static Lexicon {
        Lexicon::default_lexicon()
    }

    #[test]
    fn rejects_zero_hops() {
        assert!(matches!(
            generate_problem(lex(), 7, 0, OntologyMode::FalseWorld, 0, TargetAnswer::True),
            Err(GenerateError::InvalidHops)
        ));
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        for seed in [0u64, 7, 123456789] {
            let a = generate_problem(lex(), seed, 3, OntologyMode::FalseWorld, 11, TargetAnswer::Balanced)
                .unwrap();
            let b = generate_problem(lex(), seed, 3, OntologyMode::FalseWorld, 11, TargetAnswer::Balanced)
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn minimal_chain_is_one_fact_one_rule() {
        let p = generate_problem(lex(), 7, 1, OntologyMode::FalseWorld, 0, TargetAnswer::True).unwrap();
        assert_eq!(p.statements.len(), 2);
        assert_eq!(p.rules().count(), 1);
        assert_eq!(p.facts().count(), 1);
        assert!(oracle::answer_query(&p));
    }

    #[test]
    fn statement_count_is_chain_plus_distractors() {
        for d in [0u32, 3, 11, 15] {
            let p = generate_problem(lex(), 7, 3, OntologyMode::FalseWorld, d, TargetAnswer::True)
                .unwrap();
            assert_eq!(p.statements.len() as u32, 3 + 1 + d, "distractors={d}");
        }
    }

    #[test]
    fn classic_shape_at_three_hops() {
        // chain problem shaped like the classic example: one grounding
        // fact, three chained rules, query at the chain end
        let p = generate_problem(lex(), 7, 3, OntologyMode::FalseWorld, 0, TargetAnswer::True).unwrap();
        assert!(p.gold_answer);
        assert!(oracle::answer_query(&p));
        assert_eq!(oracle::derivation_depth(&p, &p.query.triple()), Some(3));
    }

    #[test]
    fn verdict_matches_gold_across_modes_and_targets() {
        for mode in [OntologyMode::FalseWorld, OntologyMode::TrueWorld] {
            for target in [TargetAnswer::True, TargetAnswer::False, TargetAnswer::Balanced] {
                for hops in 1..=3u32 {
                    for seed in 0..20u64 {
                        let p = generate_problem(lex(), seed, hops, mode, 8, target).unwrap();
                        assert_eq!(
                            oracle::answer_query(&p),
                            p.gold_answer,
                            "seed={seed} hops={hops} mode={mode:?} target={target:?}"
                        );
                        if p.gold_answer {
                            assert_eq!(
                                oracle::derivation_depth(&p, &p.query.triple()),
                                Some(hops)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_target_is_roughly_even() {
        let trues = (0..200u64)
            .filter(|&seed| {
                generate_problem(lex(), seed, 2, OntologyMode::FalseWorld, 4, TargetAnswer::Balanced)
                    .unwrap()
                    .gold_answer
            })
            .count();
        assert!((60..=140).contains(&trues), "trues={trues}");
    }

    #[test]
    fn deleting_distractors_never_changes_the_verdict() {
        for seed in 0..30u64 {
            for target in [TargetAnswer::True, TargetAnswer::False] {
                let p = generate_problem(lex(), seed, 2, OntologyMode::FalseWorld, 9, target).unwrap();
                let full = oracle::answer_query(&p);
                // keep only the statements on the gold derivation path
                // (for gold-false, keep just the grounding facts)
                let core: Vec<Statement> = p
                    .statements
                    .iter()
                    .filter(|s| {
                        s.kind == StatementKind::Fact
                            || oracle::derivation_depth(
                                &p,
                                &crate::triple::Triple {
                                    subject: p.individual().to_string(),
                                    predicate: s.predicate.clone(),
                                    polarity: s.polarity,
                                },
                            )
                            .is_some()
                    })
                    .cloned()
                    .collect();
                let stripped = Problem {
                    statements: core,
                    ..p.clone()
                };
                assert_eq!(oracle::answer_query(&stripped), full);
            }
        }
    }

    #[test]
    fn same_seed_longer_distractor_list_keeps_the_chain() {
        let small = generate_problem(lex(), 9, 3, OntologyMode::FalseWorld, 2, TargetAnswer::Balanced)
            .unwrap();
        let large = generate_problem(lex(), 9, 3, OntologyMode::FalseWorld, 12, TargetAnswer::Balanced)
            .unwrap();
        assert_eq!(small.gold_answer, large.gold_answer);
        assert_eq!(small.query, large.query);
        assert_eq!(oracle::answer_query(&small), oracle::answer_query(&large));
    }

    #[test]
    fn tiny_lexicon_exhausts() {
        let tiny = Lexicon::parse(
            "[class_nouns]\ncat cats a\ndog dogs a\n[adjectives]\n[individual_names]\nRex\n",
        )
        .unwrap();
        assert!(matches!(
            generate_problem(&tiny, 1, 3, OntologyMode::FalseWorld, 0, TargetAnswer::True),
            Err(GenerateError::LexiconExhausted { .. })
        ));
    }

    #[test]
    fn true_world_needs_a_taxonomy_path() {
        let no_edges = Lexicon::parse(
            "[class_nouns]\ncat cats a\ndog dogs a\n[adjectives]\n[individual_names]\nRex\n",
        )
        .unwrap();
        assert!(matches!(
            generate_problem(&no_edges, 1, 2, OntologyMode::TrueWorld, 0, TargetAnswer::True),
            Err(GenerateError::NoTaxonomyPath { hops: 2 })
        ));
    }

    #[test]
    fn true_world_chains_follow_the_table() {
        for seed in 0..10u64 {
            let p = generate_problem(lex(), seed, 3, OntologyMode::TrueWorld, 5, TargetAnswer::True)
                .unwrap();
            for rule in p.rules().filter(|r| r.polarity == Polarity::Positive) {
                assert!(
                    lex().is_true_edge(&rule.subject, &rule.predicate),
                    "{} -> {} not in the curated table",
                    rule.subject,
                    rule.predicate
                );
            }
        }
    }

    #[test]
    fn false_world_chains_avoid_the_table() {
        for seed in 0..10u64 {
            let p = generate_problem(lex(), seed, 3, OntologyMode::FalseWorld, 8, TargetAnswer::True)
                .unwrap();
            for rule in p.rules() {
                assert!(!lex().is_true_edge(&rule.subject, &rule.predicate));
            }
        }
    }

    #[test]
    fn rule_rendering_covers_the_templates() {
        let l = lex();
        assert_eq!(
            render_rule_sentence(l, "feline", "snake", Polarity::Positive, 0).unwrap(),
            "Every feline is a snake."
        );
        assert_eq!(
            render_rule_sentence(l, "snake", "luminous", Polarity::Positive, 1).unwrap(),
            "Each snake is luminous."
        );
        assert_eq!(
            render_rule_sentence(l, "sheep", "mammal", Polarity::Positive, 2).unwrap(),
            "Sheep are mammals."
        );
        assert_eq!(
            render_rule_sentence(l, "dog", "luminous", Polarity::Negative, 0).unwrap(),
            "Every dog is not luminous."
        );
        assert_eq!(
            render_fact_sentence(l, "alex", "sheep", Polarity::Positive).unwrap(),
            "Alex is a sheep."
        );
    }

    #[test]
    fn classic_problem_renders_verbatim() {
        let rendered = render_problem(lex(), &sample::classic_problem()).unwrap();
        assert_eq!(
            rendered.question,
            "Each sheep is sunny. Each sheep is a feline. Sheep are mammals. \
             Felines are aggressive. Every feline is a snake. Felines are carnivores. \
             Each snake is luminous. Snakes are cats. Every dog is not luminous. \
             Each snake is an animal. Animals are fast. Carnivores are opaque. \
             Each mammal is floral. Each vertebrate is not feisty. Each vertebrate is a cow. \
             Alex is a sheep. Alex is a vertebrate."
        );
        assert_eq!(rendered.query, "True or false: Alex is luminous.");
    }
}
