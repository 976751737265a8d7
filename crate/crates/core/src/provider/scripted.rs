//! Deterministic scripted providers.
//!
//! These answer from the problem's golden traces instead of calling a
//! model, which makes desk-scale campaigns reproducible and lets tests
//! manufacture known reasoning behaviours: perfect strategy-followers,
//! bare-verdict answerers, seeded coin-flippers, and controlled
//! corruptions (dropped or swapped steps, rules written before facts,
//! flipped verdicts).

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::render::render_trace;
use super::{CallContext, Completion, Provider, whitespace_tokens};
use crate::lexicon::Lexicon;
use crate::oracle::{GoldenTrace, ProofStep, TraceStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScriptedBehavior {
    /// Renders the golden trace for the given strategy verbatim.
    Perfect { strategy: TraceStrategy },
    /// Answers with just "True" or "False" (correctly).
    TerseVerdict,
    /// Seeded coin flip, independent of the gold answer.
    RandomVerdict { seed: u64 },
    /// Golden trace with a controlled defect.
    Corrupted {
        strategy: TraceStrategy,
        corruption: Corruption,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "corruption", rename_all = "snake_case")]
pub enum Corruption {
    /// Removes the step at `index`; calls whose trace is shorter are
    /// unaffected.
    DropStep { index: usize },
    SwapSteps { i: usize, j: usize },
    /// Stable partition putting every rule step before the rest.
    RulesFirst,
    /// Keeps the perfect reasoning but flips the final answer.
    WrongVerdict,
}

pub struct ScriptedProvider {
    name: String,
    behavior: ScriptedBehavior,
    lexicon: Arc<Lexicon>,
}

impl ScriptedProvider {
    pub fn new(name: String, behavior: ScriptedBehavior, lexicon: Arc<Lexicon>) -> Self {
        ScriptedProvider {
            name,
            behavior,
            lexicon,
        }
    }

    fn response_text(&self, ctx: &CallContext<'_>) -> Result<String, crate::forge::RenderError> {
        match &self.behavior {
            ScriptedBehavior::Perfect { strategy } => {
                let trace = ctx.golden.get(*strategy);
                render_trace(&self.lexicon, trace, trace.verdict)
            }
            ScriptedBehavior::TerseVerdict => {
                Ok(if ctx.golden.verdict { "True" } else { "False" }.to_string())
            }
            ScriptedBehavior::RandomVerdict { seed } => {
                let coin = splitmix64(splitmix64(*seed) ^ ctx.problem.seed) & 1 == 0;
                Ok(if coin { "True" } else { "False" }.to_string())
            }
            ScriptedBehavior::Corrupted {
                strategy,
                corruption,
            } => {
                let golden = ctx.golden.get(*strategy);
                let corrupted = corrupt_steps(golden, corruption);
                let verdict = match corruption {
                    Corruption::WrongVerdict => !golden.verdict,
                    _ => golden.verdict,
                };
                render_trace(&self.lexicon, &corrupted, verdict)
            }
        }
    }
}

impl Provider for ScriptedProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, ctx: &CallContext<'_>) -> Completion {
        match self.response_text(ctx) {
            Ok(text) => {
                let completion_tokens = whitespace_tokens(&text);
                Completion::ok(text, whitespace_tokens(&ctx.prompt.text), completion_tokens)
            }
            Err(e) => Completion::failed(format!("scripted render: {e}")),
        }
    }
}

fn corrupt_steps(golden: &GoldenTrace, corruption: &Corruption) -> GoldenTrace {
    let mut steps = golden.steps.clone();
    match corruption {
        Corruption::DropStep { index } => {
            if *index < steps.len() {
                steps.remove(*index);
            }
        }
        Corruption::SwapSteps { i, j } => {
            if *i < steps.len() && *j < steps.len() {
                steps.swap(*i, *j);
            }
        }
        Corruption::RulesFirst => {
            let (rules, rest): (Vec<ProofStep>, Vec<ProofStep>) = steps
                .into_iter()
                .partition(|s| matches!(s, ProofStep::RuleUsed { .. }));
            steps = rules;
            steps.extend(rest);
        }
        Corruption::WrongVerdict => {}
    }
    GoldenTrace {
        strategy: golden.strategy,
        steps,
        verdict: golden.verdict,
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::ResponseParser;
    use crate::fidelity::{has_all_steps, is_faithful, ComparisonMode};
    use crate::forge::render_problem;
    use crate::oracle::TraceSet;
    use crate::problem::Problem;
    use crate::prompt::{PromptKit, Strategy};
    use crate::sample;

    fn call(problem: &Problem, behavior: ScriptedBehavior) -> (Completion, TraceSet) {
        let lexicon = Arc::new(Lexicon::default_lexicon().clone());
        let rendered = render_problem(&lexicon, problem).unwrap();
        let prompt = PromptKit::builtin()
            .build_prompt(Strategy::BottomUp, &problem.id, &rendered)
            .unwrap();
        let golden = TraceSet::compute(problem);
        let provider = ScriptedProvider::new("scripted".into(), behavior, lexicon);
        let completion = provider.complete(&CallContext {
            prompt: &prompt,
            problem,
            golden: &golden,
        });
        (completion, golden)
    }

    #[test]
    fn terse_verdict_is_one_token() {
        let p = sample::classic_problem();
        let (c, _) = call(&p, ScriptedBehavior::TerseVerdict);
        assert_eq!(c.text, "True");
        assert_eq!(c.completion_tokens, 1);
        assert!(c.is_ok());
    }

    #[test]
    fn random_verdict_is_deterministic_per_seed() {
        let p = sample::classic_problem();
        let (a, _) = call(&p, ScriptedBehavior::RandomVerdict { seed: 1 });
        let (b, _) = call(&p, ScriptedBehavior::RandomVerdict { seed: 1 });
        assert_eq!(a, b);
        assert!(a.text == "True" || a.text == "False");
    }

    #[test]
    fn perfect_response_is_fully_faithful() {
        let p = sample::classic_problem();
        let (c, golden) = call(
            &p,
            ScriptedBehavior::Perfect {
                strategy: TraceStrategy::BottomUp,
            },
        );
        let parser = ResponseParser::new(Lexicon::default_lexicon());
        let parsed = parser.parse(&c.text, p.individual());
        assert_eq!(parsed.verdict, true);
        let golden_triples = golden
            .get(TraceStrategy::BottomUp)
            .comparison_triples(ComparisonMode::RulesAndFacts);
        assert!(has_all_steps(&parsed.triples, &golden_triples).unwrap());
        assert!(is_faithful(&parsed.triples, &golden_triples).unwrap());
    }

    #[test]
    fn rules_first_keeps_steps_but_breaks_order() {
        let p = sample::classic_problem();
        let (c, golden) = call(
            &p,
            ScriptedBehavior::Corrupted {
                strategy: TraceStrategy::BottomUp,
                corruption: Corruption::RulesFirst,
            },
        );
        let parser = ResponseParser::new(Lexicon::default_lexicon());
        let parsed = parser.parse(&c.text, p.individual());
        let golden_triples = golden
            .get(TraceStrategy::BottomUp)
            .comparison_triples(ComparisonMode::RulesAndFacts);
        assert!(has_all_steps(&parsed.triples, &golden_triples).unwrap());
        assert!(!is_faithful(&parsed.triples, &golden_triples).unwrap());
        // the verdict is still the right one
        assert_eq!(parsed.verdict, golden.verdict);
    }

    #[test]
    fn drop_step_loses_a_required_triple() {
        let p = sample::classic_problem();
        let (c, golden) = call(
            &p,
            ScriptedBehavior::Corrupted {
                strategy: TraceStrategy::BottomUp,
                corruption: Corruption::DropStep { index: 0 },
            },
        );
        let parser = ResponseParser::new(Lexicon::default_lexicon());
        let parsed = parser.parse(&c.text, p.individual());
        let golden_triples = golden
            .get(TraceStrategy::BottomUp)
            .comparison_triples(ComparisonMode::RulesAndFacts);
        assert!(!has_all_steps(&parsed.triples, &golden_triples).unwrap());
    }

    #[test]
    fn wrong_verdict_flips_only_the_answer() {
        let p = sample::classic_problem();
        let (c, golden) = call(
            &p,
            ScriptedBehavior::Corrupted {
                strategy: TraceStrategy::BottomUp,
                corruption: Corruption::WrongVerdict,
            },
        );
        let parser = ResponseParser::new(Lexicon::default_lexicon());
        let parsed = parser.parse(&c.text, p.individual());
        assert_ne!(parsed.verdict, golden.verdict);
        let golden_triples = golden
            .get(TraceStrategy::BottomUp)
            .comparison_triples(ComparisonMode::RulesAndFacts);
        assert!(is_faithful(&parsed.triples, &golden_triples).unwrap());
    }
}
