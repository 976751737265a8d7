//! Uniform client layer for chat-completion providers.
//!
//! Remote providers speak the published HTTP chat contracts (OpenAI-style
//! `chat/completions` or Anthropic-style `messages`) with retry, backoff
//! and a shared per-provider rate limiter. Scripted providers are
//! deterministic stand-ins that answer from the golden traces, so whole
//! campaigns can run offline and reproduce known reasoning behaviours.
//!
//! Failures never escape `complete`: a call that exhausts its retries
//! becomes a `failed` completion and stays in the record stream.

mod clock;
mod limit;
mod remote;
mod render;
pub(crate) mod scripted;

pub use clock::{Clock, LogicalClock, SystemClock};
pub use limit::RateLimiter;
pub use remote::{
    HttpRequest, HttpResponse, RemoteConfig, RemoteProvider, ReqwestTransport, Transport,
    TransportError, WireFormat,
};
pub use render::render_trace;
pub use scripted::{Corruption, ScriptedBehavior, ScriptedProvider};

use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::oracle::TraceSet;
use crate::problem::Problem;
use crate::prompt::RenderedPrompt;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("credential environment variable {0} is not set")]
    MissingCredential(String),
    #[error("invalid provider config for {name}: {reason}")]
    InvalidConfig { name: String, reason: String },
}

/// Result of one call. Token counts are provider-reported for remote
/// calls and whitespace-token counts for scripted ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: u32,
    pub completion_tokens: u32,
    #[serde(flatten)]
    pub status: CompletionStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CompletionStatus {
    Ok,
    Failed { reason: String },
}

impl Completion {
    pub fn ok(text: String, prompt_tokens: u32, completion_tokens: u32) -> Completion {
        Completion {
            text,
            prompt_tokens,
            completion_tokens,
            status: CompletionStatus::Ok,
        }
    }

    pub fn failed(reason: impl Into<String>) -> Completion {
        Completion {
            text: String::new(),
            prompt_tokens: 0,
            completion_tokens: 0,
            status: CompletionStatus::Failed {
                reason: reason.into(),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == CompletionStatus::Ok
    }
}

/// Everything a provider may need for one call. Remote providers only
/// read the prompt; scripted providers answer from the problem and its
/// golden traces.
pub struct CallContext<'a> {
    pub prompt: &'a RenderedPrompt,
    pub problem: &'a Problem,
    pub golden: &'a TraceSet,
}

pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    /// Never panics and never errors past this boundary; terminal
    /// failures are returned as failed completions.
    fn complete(&self, ctx: &CallContext<'_>) -> Completion;
}

/// Campaign-file entry for one provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub name: String,
    /// Bound on simultaneous in-flight requests for this provider.
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(flatten)]
    pub spec: ProviderSpec,
}

fn default_parallelism() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderSpec {
    Remote(RemoteConfig),
    Scripted { behavior: ScriptedBehavior },
}

impl ProviderConfig {
    pub fn is_scripted(&self) -> bool {
        matches!(self.spec, ProviderSpec::Scripted { .. })
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.parallelism == 0 {
            return Err(ProviderError::InvalidConfig {
                name: self.name.clone(),
                reason: "parallelism must be at least 1".into(),
            });
        }
        if let ProviderSpec::Remote(remote) = &self.spec {
            remote.validate(&self.name)?;
        }
        Ok(())
    }

    /// Instantiates the provider. Remote providers resolve their API key
    /// from the environment here, so misconfiguration fails at startup
    /// rather than mid-campaign.
    pub fn build(
        &self,
        lexicon: Arc<Lexicon>,
        clock: Arc<dyn Clock>,
    ) -> Result<Box<dyn Provider>, ProviderError> {
        self.validate()?;
        match &self.spec {
            ProviderSpec::Scripted { behavior } => Ok(Box::new(ScriptedProvider::new(
                self.name.clone(),
                behavior.clone(),
                lexicon,
            ))),
            ProviderSpec::Remote(remote) => Ok(Box::new(RemoteProvider::from_env(
                self.name.clone(),
                remote.clone(),
                clock,
            )?)),
        }
    }
}

/// Whitespace token count, the deterministic stand-in used for scripted
/// providers.
pub fn whitespace_tokens(text: &str) -> u32 {
    text.split_whitespace().count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_token_count() {
        assert_eq!(whitespace_tokens("True"), 1);
        assert_eq!(whitespace_tokens(""), 0);
        assert_eq!(whitespace_tokens("Alex is a sheep.  Every sheep is luminous."), 8);
    }

    #[test]
    fn completion_status_serializes_flat() {
        let c = Completion::failed("timeout");
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"status\":\"failed\""));
        assert!(json.contains("\"reason\":\"timeout\""));
        let back: Completion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
