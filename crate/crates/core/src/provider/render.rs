//! Golden traces back to natural language.
//!
//! This is the inverse of the response parser, used by scripted
//! providers and the round-trip tests: each proof step renders to one
//! sentence the extractor maps back to exactly the step's triple.

use crate::forge::{render_fact_sentence, render_rule_sentence, RenderError};
use crate::lexicon::Lexicon;
use crate::oracle::{GoldenTrace, ProofStep};
use crate::problem::StatementKind;
use crate::triple::Triple;

fn bare_claim(lexicon: &Lexicon, triple: &Triple) -> Result<String, RenderError> {
    // "Alex is a sheep" without the final period
    let sentence = render_fact_sentence(lexicon, &triple.subject, &triple.predicate, triple.polarity)?;
    Ok(sentence.trim_end_matches('.').to_string())
}

fn render_step(lexicon: &Lexicon, step: &ProofStep) -> Result<String, RenderError> {
    Ok(match step {
        ProofStep::BaseFact { triple } => {
            render_fact_sentence(lexicon, &triple.subject, &triple.predicate, triple.polarity)?
        }
        ProofStep::RuleUsed { triple } => {
            render_rule_sentence(lexicon, &triple.subject, &triple.predicate, triple.polarity, 0)?
        }
        ProofStep::DerivedFact { triple } => {
            format!("Therefore {}.", bare_claim(lexicon, triple)?)
        }
        ProofStep::Subgoal { triple } => {
            format!("True or false: {}?", bare_claim(lexicon, triple)?)
        }
        ProofStep::RelevanceMark { triple, source } => match source {
            StatementKind::Rule => render_rule_sentence(
                lexicon,
                &triple.subject,
                &triple.predicate,
                triple.polarity,
                0,
            )?,
            StatementKind::Fact => {
                render_fact_sentence(lexicon, &triple.subject, &triple.predicate, triple.polarity)?
            }
        },
        ProofStep::NoSupport { triple } => {
            format!(
                "There is no rule or fact that shows {}.",
                bare_claim(lexicon, triple)?
            )
        }
    })
}

/// One sentence per step, terminated with "The answer is <verdict>.".
/// The verdict is passed separately so a corrupted rendering can flip it
/// without touching the steps.
pub fn render_trace(
    lexicon: &Lexicon,
    trace: &GoldenTrace,
    verdict: bool,
) -> Result<String, RenderError> {
    let mut sentences = Vec::with_capacity(trace.steps.len() + 1);
    for step in &trace.steps {
        sentences.push(render_step(lexicon, step)?);
    }
    sentences.push(format!(
        "The answer is {}.",
        if verdict { "True" } else { "False" }
    ));
    Ok(sentences.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, TraceStrategy};
    use crate::sample;

    fn lex() -> &'static Lexicon {
        Lexicon::default_lexicon()
    }

    #[test]
    fn step_sentences_match_the_templates() {
        let fact = ProofStep::BaseFact {
            triple: Triple::positive("whiskers", "cat"),
        };
        assert_eq!(render_step(lex(), &fact).unwrap(), "Whiskers is a cat.");

        let derived = ProofStep::DerivedFact {
            triple: Triple::positive("whiskers", "mammal"),
        };
        assert_eq!(
            render_step(lex(), &derived).unwrap(),
            "Therefore Whiskers is a mammal."
        );

        let subgoal = ProofStep::Subgoal {
            triple: Triple::negative("alex", "luminous"),
        };
        assert_eq!(
            render_step(lex(), &subgoal).unwrap(),
            "True or false: Alex is not luminous?"
        );
    }

    #[test]
    fn empty_trace_renders_just_the_answer() {
        let trace = GoldenTrace {
            strategy: TraceStrategy::BottomUp,
            steps: vec![],
            verdict: false,
        };
        assert_eq!(render_trace(lex(), &trace, false).unwrap(), "The answer is False.");
    }

    #[test]
    fn perfect_bottom_up_rendering_ends_with_the_conclusion() {
        let p = sample::whiskers_problem();
        let trace = oracle::bottom_up_trace(&p);
        let text = render_trace(lex(), &trace, trace.verdict).unwrap();
        assert_eq!(
            text,
            "Whiskers is a cat. Every cat is a mammal. Therefore Whiskers is a mammal. \
             Every mammal is an animal. Therefore Whiskers is an animal. The answer is True."
        );
    }

    #[test]
    fn parser_inverts_the_rendering() {
        use crate::extract::ResponseParser;
        let p = sample::classic_problem();
        let traces = oracle::TraceSet::compute(&p);
        let parser = ResponseParser::new(lex());
        for strategy in TraceStrategy::ALL {
            let trace = traces.get(strategy);
            let text = render_trace(lex(), trace, trace.verdict).unwrap();
            let parsed = parser.extract_triples(&text, p.individual());
            assert_eq!(parsed.triples, trace.step_triples(), "strategy {strategy}");
        }
    }
}
