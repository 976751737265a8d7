//! The six prompt conditions and their templates.
//!
//! Templates live in external files (one per strategy) with `{question}`
//! and `{query}` slots, so a campaign can pin and diff the exact prompt
//! text it ran with. The built-in set is embedded in the binary and
//! guarded by pinned digests; `write_to_dir` copies it, with a manifest,
//! into each run directory.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::forge::RenderedProblem;
use crate::oracle::TraceStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Normal,
    Cot,
    OneShotCot,
    BottomUp,
    TopDown,
    MagicSet,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Normal,
        Strategy::Cot,
        Strategy::OneShotCot,
        Strategy::BottomUp,
        Strategy::TopDown,
        Strategy::MagicSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Normal => "normal",
            Strategy::Cot => "cot",
            Strategy::OneShotCot => "one_shot_cot",
            Strategy::BottomUp => "bottom_up",
            Strategy::TopDown => "top_down",
            Strategy::MagicSet => "magic_set",
        }
    }

    /// The golden-trace strategy this prompt instructs, if any. The
    /// normal and chain-of-thought conditions prescribe no proof shape;
    /// they are graded against the bottom-up trace, the usual shape of
    /// free chain-of-thought reasoning.
    pub fn trace_strategy(self) -> Option<TraceStrategy> {
        match self {
            Strategy::BottomUp => Some(TraceStrategy::BottomUp),
            Strategy::TopDown => Some(TraceStrategy::TopDown),
            Strategy::MagicSet => Some(TraceStrategy::MagicSet),
            _ => None,
        }
    }

    /// Trace used for grading: instructed strategy, defaulting to
    /// bottom-up for the unconstrained conditions.
    pub fn grading_trace(self) -> TraceStrategy {
        self.trace_strategy().unwrap_or(TraceStrategy::BottomUp)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Strategy, PromptError> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PromptError::UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("template for {strategy} must contain {slot} exactly once, found {count}")]
    BadSlot {
        strategy: Strategy,
        slot: &'static str,
        count: usize,
    },
    #[error("rendered prompt for {0} still contains a literal template slot")]
    UnfilledSlot(Strategy),
    #[error("failed to read template {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub strategy: Strategy,
    pub problem_id: String,
    pub text: String,
}

const QUESTION_SLOT: &str = "{question}";
const QUERY_SLOT: &str = "{query}";

fn builtin_template(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Normal => include_str!("templates/normal.txt"),
        Strategy::Cot => include_str!("templates/cot.txt"),
        Strategy::OneShotCot => include_str!("templates/one_shot_cot.txt"),
        Strategy::BottomUp => include_str!("templates/bottom_up.txt"),
        Strategy::TopDown => include_str!("templates/top_down.txt"),
        Strategy::MagicSet => include_str!("templates/magic_set.txt"),
    }
}

#[derive(Debug, Clone)]
pub struct PromptKit {
    templates: BTreeMap<Strategy, String>,
}

impl PromptKit {
    /// The embedded template set.
    pub fn builtin() -> &'static PromptKit {
        static KIT: OnceLock<PromptKit> = OnceLock::new();
        KIT.get_or_init(|| {
            let templates = Strategy::ALL
                .into_iter()
                .map(|s| (s, builtin_template(s).to_string()))
                .collect();
            let kit = PromptKit { templates };
            kit.validate().expect("builtin templates are well-formed");
            kit
        })
    }

    /// Loads `<strategy>.txt` for each strategy from a directory.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<PromptKit, PromptError> {
        let mut templates = BTreeMap::new();
        for strategy in Strategy::ALL {
            let path = dir.as_ref().join(format!("{}.txt", strategy.name()));
            let text = std::fs::read_to_string(&path).map_err(|source| PromptError::Io {
                path: path.display().to_string(),
                source,
            })?;
            templates.insert(strategy, text);
        }
        let kit = PromptKit { templates };
        kit.validate()?;
        Ok(kit)
    }

    fn validate(&self) -> Result<(), PromptError> {
        for (&strategy, template) in &self.templates {
            for slot in [QUESTION_SLOT, QUERY_SLOT] {
                let count = template.matches(slot).count();
                if count != 1 {
                    return Err(PromptError::BadSlot {
                        strategy,
                        slot: if slot == QUESTION_SLOT {
                            "{question}"
                        } else {
                            "{query}"
                        },
                        count,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn template(&self, strategy: Strategy) -> &str {
        &self.templates[&strategy]
    }

    /// Fills the slots for one problem. The output carries the question
    /// and query exactly once each, with no literal slot left behind.
    pub fn build_prompt(
        &self,
        strategy: Strategy,
        problem_id: &str,
        rendered: &RenderedProblem,
    ) -> Result<RenderedPrompt, PromptError> {
        let text = self
            .template(strategy)
            .replacen(QUESTION_SLOT, &rendered.question, 1)
            .replacen(QUERY_SLOT, &rendered.query, 1);
        if text.contains(QUESTION_SLOT) || text.contains(QUERY_SLOT) {
            return Err(PromptError::UnfilledSlot(strategy));
        }
        Ok(RenderedPrompt {
            strategy,
            problem_id: problem_id.to_string(),
            text,
        })
    }

    /// SHA-256 of each template with empty slots, hex encoded.
    pub fn digests(&self) -> BTreeMap<Strategy, String> {
        self.templates
            .iter()
            .map(|(&s, t)| (s, sha256_hex(t)))
            .collect()
    }

    /// Writes the template files plus a `templates.sha256` manifest.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> std::io::Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut manifest = String::new();
        for (&strategy, template) in &self.templates {
            let file = format!("{}.txt", strategy.name());
            std::fs::write(dir.join(&file), template)?;
            manifest.push_str(&format!("{}  {}\n", sha256_hex(template), file));
        }
        std::fs::write(dir.join("templates.sha256"), manifest)
    }
}

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
