//! Campaign configuration file handling.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::fidelity::ComparisonMode;
use crate::forge::GenerateError;
use crate::lexicon::{Lexicon, LexiconError};
use crate::problem::{OntologyMode, TargetAnswer};
use crate::prompt::{PromptError, Strategy};
use crate::provider::{ProviderConfig, ProviderError};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config serialize error: {0}")]
    TomlSer(#[from] toml::ser::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("render error: {0}")]
    Render(#[from] crate::forge::RenderError),
    #[error("record error in {path}: {reason}")]
    Record { path: String, reason: String },
    #[error("run directory {0} contains no records")]
    EmptyRun(String),
    #[error("no summaries found at {0}; run `score` first")]
    MissingSummaries(String),
}

pub(crate) fn io_err(path: &Path, source: std::io::Error) -> CampaignError {
    CampaignError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockKind {
    /// Virtual clock; timestamps are deterministic ticks. Default when
    /// every provider is scripted.
    Logical,
    /// Wall clock. Default when any provider is remote.
    System,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub ontology_mode: OntologyMode,
    pub distractor_count: u32,
    pub target_answer: TargetAnswer,
    /// Optional external lexicon file; the embedded default otherwise.
    pub lexicon: Option<PathBuf>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            ontology_mode: OntologyMode::FalseWorld,
            distractor_count: 11,
            target_answer: TargetAnswer::Balanced,
            lexicon: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub master_seed: u64,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_hops")]
    pub hops: Vec<u32>,
    #[serde(default = "default_calls_per_cell")]
    pub calls_per_cell: u32,
    /// Completions at or below this many tokens are treated as giving no
    /// reasoning.
    #[serde(default = "default_token_threshold")]
    pub token_threshold: u32,
    #[serde(default)]
    pub comparison_mode: ComparisonMode,
    #[serde(default)]
    pub clock: Option<ClockKind>,
    /// Optional directory of prompt templates (one `<strategy>.txt` per
    /// strategy); the embedded set otherwise.
    #[serde(default)]
    pub templates: Option<PathBuf>,
    #[serde(default)]
    pub generation: GenerationConfig,
    pub providers: Vec<ProviderConfig>,
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

fn default_hops() -> Vec<u32> {
    vec![1, 2, 3]
}

fn default_calls_per_cell() -> u32 {
    100
}

fn default_token_threshold() -> u32 {
    10
}

impl CampaignConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<CampaignConfig, CampaignError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let config: CampaignConfig = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.calls_per_cell < 1 {
            return Err(CampaignError::Invalid("calls_per_cell must be at least 1".into()));
        }
        if self.hops.is_empty() {
            return Err(CampaignError::Invalid("hops must be nonempty".into()));
        }
        if self.hops.iter().any(|&h| h < 1) {
            return Err(CampaignError::Invalid("every hop count must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(CampaignError::Invalid("strategies must be nonempty".into()));
        }
        let mut seen = HashSet::new();
        for s in &self.strategies {
            if !seen.insert(*s) {
                return Err(CampaignError::Invalid(format!("duplicate strategy {s}")));
            }
        }
        if self.providers.is_empty() {
            return Err(CampaignError::Invalid("at least one provider is required".into()));
        }
        let mut names = HashSet::new();
        for p in &self.providers {
            if !names.insert(p.name.clone()) {
                return Err(CampaignError::Invalid(format!("duplicate provider name {}", p.name)));
            }
            p.validate()?;
        }
        Ok(())
    }

    pub fn lexicon(&self) -> Result<Lexicon, CampaignError> {
        match &self.generation.lexicon {
            Some(path) => Ok(Lexicon::load(path)?),
            None => Ok(Lexicon::default_lexicon().clone()),
        }
    }

    pub fn prompt_kit(&self) -> Result<crate::prompt::PromptKit, CampaignError> {
        match &self.templates {
            Some(dir) => Ok(crate::prompt::PromptKit::from_dir(dir)?),
            None => Ok(crate::prompt::PromptKit::builtin().clone()),
        }
    }

    /// Logical clock iff every provider is scripted, unless overridden.
    pub fn clock_kind(&self) -> ClockKind {
        self.clock.unwrap_or_else(|| {
            if self.providers.iter().all(|p| p.is_scripted()) {
                ClockKind::Logical
            } else {
                ClockKind::System
            }
        })
    }

    pub fn total_cells(&self) -> usize {
        self.providers.len() * self.strategies.len() * self.hops.len()
    }
}
