//! HTTP chat-completion client with retry, backoff and rate limiting.
//!
//! Transport is abstracted behind a trait so the retry logic is testable
//! without a network; the default transport is a blocking reqwest
//! client. Credentials come from the environment only and are never
//! serialized into configs or records.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::sync::Arc;
use thiserror::Error;

use super::clock::Clock;
use super::limit::RateLimiter;
use super::{CallContext, Completion, Provider, ProviderError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireFormat {
    /// POST {base_url}/chat/completions with a bearer token.
    OpenaiChat,
    /// POST {base_url}/messages with an x-api-key header.
    AnthropicMessages,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub wire: WireFormat,
    pub base_url: String,
    pub model: String,
    pub api_key_env: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    /// 0 disables rate limiting.
    #[serde(default = "default_rpm")]
    pub requests_per_minute: u32,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_backoff_base_ms")]
    pub backoff_base_ms: u64,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_max_output_tokens() -> u32 {
    1024
}
fn default_rpm() -> u32 {
    60
}
fn default_max_attempts() -> u32 {
    3
}
fn default_backoff_base_ms() -> u64 {
    500
}
fn default_timeout_ms() -> u64 {
    120_000
}

impl RemoteConfig {
    pub fn validate(&self, name: &str) -> Result<(), ProviderError> {
        if self.temperature < 0.0 || self.temperature.is_nan() {
            return Err(ProviderError::InvalidConfig {
                name: name.to_string(),
                reason: format!("temperature must be >= 0, got {}", self.temperature),
            });
        }
        if self.max_attempts < 1 {
            return Err(ProviderError::InvalidConfig {
                name: name.to_string(),
                reason: "max_attempts must be at least 1".into(),
            });
        }
        Ok(())
    }
}

pub struct HttpRequest {
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("timeout")]
    Timeout,
    #[error("connect: {0}")]
    Connect(String),
    #[error("{0}")]
    Other(String),
}

pub trait Transport: Send + Sync {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(timeout_ms: u64) -> ReqwestTransport {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_millis(timeout_ms))
            .build()
            .expect("reqwest client");
        ReqwestTransport { client }
    }
}

impl Transport for ReqwestTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let mut builder = self.client.post(&request.url);
        for (name, value) in &request.headers {
            builder = builder.header(name, value);
        }
        let response = builder.body(request.body.clone()).send().map_err(|e| {
            if e.is_timeout() {
                TransportError::Timeout
            } else if e.is_connect() {
                TransportError::Connect(e.to_string())
            } else {
                TransportError::Other(e.to_string())
            }
        })?;
        let status = response.status().as_u16();
        let body = response
            .text()
            .map_err(|e| TransportError::Other(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

pub struct RemoteProvider {
    name: String,
    config: RemoteConfig,
    api_key: String,
    transport: Box<dyn Transport>,
    limiter: RateLimiter,
    clock: Arc<dyn Clock>,
}

impl RemoteProvider {
    pub fn from_env(
        name: String,
        config: RemoteConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<RemoteProvider, ProviderError> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| ProviderError::MissingCredential(config.api_key_env.clone()))?;
        let transport = Box::new(ReqwestTransport::new(config.timeout_ms));
        Ok(RemoteProvider::with_transport(name, config, api_key, transport, clock))
    }

    pub fn with_transport(
        name: String,
        config: RemoteConfig,
        api_key: String,
        transport: Box<dyn Transport>,
        clock: Arc<dyn Clock>,
    ) -> RemoteProvider {
        let limiter = RateLimiter::per_minute(config.requests_per_minute);
        RemoteProvider {
            name,
            config,
            api_key,
            transport,
            limiter,
            clock,
        }
    }

    fn request_for(&self, prompt_text: &str) -> HttpRequest {
        let base = self.config.base_url.trim_end_matches('/');
        match self.config.wire {
            WireFormat::OpenaiChat => HttpRequest {
                url: format!("{base}/chat/completions"),
                headers: vec![
                    ("authorization".into(), format!("Bearer {}", self.api_key)),
                    ("content-type".into(), "application/json".into()),
                ],
                body: json!({
                    "model": self.config.model,
                    "messages": [{"role": "user", "content": prompt_text}],
                    "temperature": self.config.temperature,
                    "max_tokens": self.config.max_output_tokens,
                })
                .to_string(),
            },
            WireFormat::AnthropicMessages => HttpRequest {
                url: format!("{base}/messages"),
                headers: vec![
                    ("x-api-key".into(), self.api_key.clone()),
                    ("anthropic-version".into(), "2023-06-01".into()),
                    ("content-type".into(), "application/json".into()),
                ],
                body: json!({
                    "model": self.config.model,
                    "max_tokens": self.config.max_output_tokens,
                    "temperature": self.config.temperature,
                    "messages": [{"role": "user", "content": prompt_text}],
                })
                .to_string(),
            },
        }
    }

    fn parse_response(&self, body: &str) -> Result<Completion, String> {
        let value: serde_json::Value =
            serde_json::from_str(body).map_err(|e| format!("malformed json: {e}"))?;
        let (text, prompt_tokens, completion_tokens) = match self.config.wire {
            WireFormat::OpenaiChat => (
                value["choices"][0]["message"]["content"]
                    .as_str()
                    .ok_or("missing choices[0].message.content")?
                    .to_string(),
                value["usage"]["prompt_tokens"].as_u64().unwrap_or(0),
                value["usage"]["completion_tokens"].as_u64().unwrap_or(0),
            ),
            WireFormat::AnthropicMessages => (
                value["content"][0]["text"]
                    .as_str()
                    .ok_or("missing content[0].text")?
                    .to_string(),
                value["usage"]["input_tokens"].as_u64().unwrap_or(0),
                value["usage"]["output_tokens"].as_u64().unwrap_or(0),
            ),
        };
        Ok(Completion::ok(
            text,
            prompt_tokens as u32,
            completion_tokens as u32,
        ))
    }
}

fn retryable_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

impl Provider for RemoteProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, ctx: &CallContext<'_>) -> Completion {
        let request = self.request_for(&ctx.prompt.text);
        let mut last_reason = String::from("no attempt made");
        for attempt in 1..=self.config.max_attempts {
            self.limiter.acquire(&*self.clock);
            match self.transport.send(&request) {
                Ok(response) if response.status == 200 => {
                    return match self.parse_response(&response.body) {
                        Ok(completion) => completion,
                        Err(reason) => Completion::failed(reason),
                    };
                }
                Ok(response) if retryable_status(response.status) => {
                    last_reason = format!("http {}", response.status);
                }
                Ok(response) => {
                    // auth and other client errors are terminal
                    return Completion::failed(format!("http {}", response.status));
                }
                Err(e) => {
                    last_reason = e.to_string();
                }
            }
            if attempt < self.config.max_attempts {
                let backoff = self.config.backoff_base_ms.saturating_mul(1 << (attempt - 1));
                self.clock.sleep_ms(backoff);
            }
        }
        Completion::failed(last_reason)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::render_problem;
    use crate::lexicon::Lexicon;
    use crate::oracle::TraceSet;
    use crate::prompt::{PromptKit, Strategy};
    use crate::provider::clock::LogicalClock;
    use crate::sample;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    fn config() -> RemoteConfig {
        RemoteConfig {
            wire: WireFormat::OpenaiChat,
            base_url: "http://localhost".into(),
            model: "test-model".into(),
            api_key_env: "TEST_KEY".into(),
            temperature: 0.0,
            max_output_tokens: 128,
            requests_per_minute: 0,
            max_attempts: 3,
            backoff_base_ms: 100,
            timeout_ms: 1_000,
        }
    }

    /// Serves a fixed script of responses and counts requests.
    struct ScriptTransport {
        responses: Mutex<Vec<Result<HttpResponse, TransportError>>>,
        calls: Arc<AtomicUsize>,
    }

    impl ScriptTransport {
        fn new(responses: Vec<Result<HttpResponse, TransportError>>) -> ScriptTransport {
            ScriptTransport {
                responses: Mutex::new(responses),
                calls: Arc::new(AtomicUsize::new(0)),
            }
        }
    }

    impl Transport for ScriptTransport {
        fn send(&self, _request: &HttpRequest) -> Result<HttpResponse, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.responses.lock().unwrap().remove(0)
        }
    }

    fn ok_body() -> String {
        serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": "The answer is True."}}],
            "usage": {"prompt_tokens": 40, "completion_tokens": 5}
        })
        .to_string()
    }

    fn run_call(provider: &RemoteProvider) -> Completion {
        let p = sample::whiskers_problem();
        let lexicon = Lexicon::default_lexicon();
        let rendered = render_problem(lexicon, &p).unwrap();
        let prompt = PromptKit::builtin()
            .build_prompt(Strategy::Normal, &p.id, &rendered)
            .unwrap();
        let golden = TraceSet::compute(&p);
        provider.complete(&CallContext {
            prompt: &prompt,
            problem: &p,
            golden: &golden,
        })
    }

    fn provider_with(script: Vec<Result<HttpResponse, TransportError>>) -> (RemoteProvider, Arc<LogicalClock>) {
        let clock = Arc::new(LogicalClock::new());
        let transport = Box::new(ScriptTransport::new(script));
        let provider = RemoteProvider::with_transport(
            "fake".into(),
            config(),
            "sk-test".into(),
            transport,
            clock.clone(),
        );
        (provider, clock)
    }

    #[test]
    fn success_parses_text_and_usage() {
        let (provider, _) = provider_with(vec![Ok(HttpResponse {
            status: 200,
            body: ok_body(),
        })]);
        let c = run_call(&provider);
        assert!(c.is_ok());
        assert_eq!(c.text, "The answer is True.");
        assert_eq!(c.prompt_tokens, 40);
        assert_eq!(c.completion_tokens, 5);
    }

    #[test]
    fn retries_stop_at_first_success() {
        let (provider, clock) = provider_with(vec![
            Err(TransportError::Timeout),
            Ok(HttpResponse { status: 429, body: String::new() }),
            Ok(HttpResponse { status: 200, body: ok_body() }),
        ]);
        let c = run_call(&provider);
        assert!(c.is_ok());
        // backoff 100 then 200 logical ms elapsed
        assert!(clock.now_ms() >= 300);
    }

    #[test]
    fn terminal_failure_uses_exactly_max_attempts() {
        let transport = ScriptTransport::new(vec![
            Err(TransportError::Timeout),
            Err(TransportError::Timeout),
            Err(TransportError::Timeout),
            Err(TransportError::Timeout),
        ]);
        let calls = transport.calls.clone();
        let clock = Arc::new(LogicalClock::new());
        let provider = RemoteProvider::with_transport(
            "fake".into(),
            config(),
            "sk-test".into(),
            Box::new(transport),
            clock,
        );
        let c = run_call(&provider);
        assert!(!c.is_ok());
        assert_eq!(c.text, "");
        // max_attempts requests, no more
        assert_eq!(calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn auth_errors_do_not_retry() {
        let (provider, _) = provider_with(vec![Ok(HttpResponse {
            status: 401,
            body: String::new(),
        })]);
        let c = run_call(&provider);
        assert_eq!(
            c.status,
            crate::provider::CompletionStatus::Failed { reason: "http 401".into() }
        );
    }

    #[test]
    fn anthropic_wire_shape() {
        let mut cfg = config();
        cfg.wire = WireFormat::AnthropicMessages;
        let clock = Arc::new(LogicalClock::new());
        let provider = RemoteProvider::with_transport(
            "fake".into(),
            cfg,
            "sk-test".into(),
            Box::new(ScriptTransport::new(vec![])),
            clock,
        );
        let req = provider.request_for("hello");
        assert!(req.url.ends_with("/messages"));
        assert!(req.headers.iter().any(|(k, _)| k == "x-api-key"));
        let body: serde_json::Value = serde_json::from_str(&req.body).unwrap();
        assert_eq!(body["messages"][0]["content"], "hello");
        // no system message is sent by default
        assert!(body.get("system").is_none());
    }
}
