//! Chat-completion adapter: prompt assembly, an OpenAI-compatible HTTP
//! client with retry/backoff, response parsers, token accounting, and
//! record/replay transcripts for deterministic offline testing.

mod parse;
mod policy;
mod prompts;
mod transcript;

pub use parse::{parse_action_sequence, parse_actions_line, parse_rating, parse_selection};
pub use policy::{LlmPolicy, LlmPolicyConfig};
pub use prompts::{
    build_prompt, build_translation_prompt, PromptInputs, PromptKind, TranslationKind,
};
pub use transcript::{TranscriptEntry, TranscriptIndex, TranscriptWriter};

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable holding the API key for live mode.
pub const API_KEY_ENV: &str = "QUERYPLAN_API_KEY";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("endpoint error after {attempts} attempt(s){}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Endpoint {
        status: Option<u16>,
        message: String,
        attempts: u32,
    },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("format error: {0}")]
    Format(String),
    #[error("unknown action '{0}'")]
    UnknownAction(String),
    #[error("prompt kind '{kind}' is missing required field '{field}'")]
    MissingField { kind: String, field: String },
    #[error("replay miss for fingerprint {fingerprint}")]
    ReplayMiss { fingerprint: String },
    #[error("transcript error: {0}")]
    Transcript(String),
}

/// Client configuration; the API key comes from [`API_KEY_ENV`] and is only
/// read in live mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlmConfig {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

fn default_temperature() -> f64 {
    0.7
}

fn default_max_retries() -> u32 {
    3
}

fn default_timeout_secs() -> u64 {
    60
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            base_url: "https://api.openai.com/v1".to_string(),
            model: "gpt-4-turbo".to_string(),
            temperature: default_temperature(),
            max_retries: default_max_retries(),
            timeout_secs: default_timeout_secs(),
        }
    }
}

/// One completed exchange, with usage counts from the endpoint's response.
#[derive(Debug, Clone)]
pub struct ChatExchange {
    pub system_text: String,
    pub user_text: String,
    pub response_text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub request_fingerprint: String,
}

/// Stable request fingerprint over (system, user, model, temperature);
/// FNV-1a so it is identical across runs and platforms.
pub fn request_fingerprint(system: &str, user: &str, model: &str, temperature: f64) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x1000_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
        hash ^= 0x1f;
        hash = hash.wrapping_mul(PRIME);
    };
    eat(system.as_bytes());
    eat(user.as_bytes());
    eat(model.as_bytes());
    eat(format!("{temperature:?}").as_bytes());
    format!("{hash:016x}")
}

/// Raw completion from whichever backend served it.
#[derive(Debug, Clone)]
pub struct RawCompletion {
    pub response_text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Anything that can answer a (system, user) prompt pair. The HTTP backend
/// is the live implementation; tests and examples plug in scripted ones.
pub trait Backend {
    fn complete(&mut self, system_text: &str, user_text: &str) -> Result<RawCompletion, LlmError>;
}

/// Live OpenAI-compatible `/chat/completions` backend over ureq, with
/// exponential backoff (base 1s, factor 2, ±20% jitter) on transport errors,
/// 429s, and 5xx responses.
pub struct HttpBackend {
    agent: ureq::Agent,
    config: LlmConfig,
    api_key: String,
}

impl HttpBackend {
    pub fn new(config: LlmConfig) -> Result<Self, LlmError> {
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| LlmError::Auth(format!("{API_KEY_ENV} is not set")))?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(HttpBackend {
            agent,
            config,
            api_key,
        })
    }

    fn backoff(attempt: u32) -> Duration {
        let base_ms = 1000u64.saturating_mul(1 << attempt.min(8));
        // ±20% jitter; live-only path, so unseeded randomness is fine.
        let jitter = (rand::random::<f64>() - 0.5) * 0.4;
        Duration::from_millis(((base_ms as f64) * (1.0 + jitter)) as u64)
    }

    fn post_once(&self, body: &str) -> Result<(u16, String), LlmError> {
        let url = format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        );
        let mut response = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .header("Content-Type", "application/json")
            .send(body)
            .map_err(|e| LlmError::Endpoint {
                status: None,
                message: e.to_string(),
                attempts: 1,
            })?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| LlmError::Endpoint {
                status: Some(status),
                message: format!("reading body: {e}"),
                attempts: 1,
            })?;
        Ok((status, text))
    }
}

impl Backend for HttpBackend {
    fn complete(&mut self, system_text: &str, user_text: &str) -> Result<RawCompletion, LlmError> {
        let body = serde_json::json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "temperature": self.config.temperature,
        })
        .to_string();
        let mut rate_limited = false;
        let mut last_message = String::new();
        let mut last_status = None;
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                std::thread::sleep(Self::backoff(attempt - 1));
            }
            match self.post_once(&body) {
                Ok((status, text)) => match status {
                    200..=299 => return parse_completion_body(&text),
                    401 | 403 => return Err(LlmError::Auth(format!("status {status}: {text}"))),
                    429 => {
                        rate_limited = true;
                        last_status = Some(status);
                        last_message = text;
                    }
                    500..=599 => {
                        last_status = Some(status);
                        last_message = text;
                    }
                    other => {
                        return Err(LlmError::Endpoint {
                            status: Some(other),
                            message: text,
                            attempts: attempt + 1,
                        })
                    }
                },
                Err(LlmError::Endpoint { message, .. }) => {
                    last_status = None;
                    last_message = message;
                }
                Err(other) => return Err(other),
            }
        }
        if rate_limited {
            Err(LlmError::RateLimited {
                attempts: self.config.max_retries + 1,
            })
        } else {
            Err(LlmError::Endpoint {
                status: last_status,
                message: last_message,
                attempts: self.config.max_retries + 1,
            })
        }
    }
}

fn parse_completion_body(text: &str) -> Result<RawCompletion, LlmError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| LlmError::Endpoint {
        status: Some(200),
        message: format!("malformed completion body: {e}"),
        attempts: 1,
    })?;
    let response_text = value["choices"][0]["message"]["content"]
        .as_str()
        .ok_or_else(|| LlmError::Endpoint {
            status: Some(200),
            message: "completion body missing choices[0].message.content".into(),
            attempts: 1,
        })?
        .to_string();
    let prompt_tokens = value["usage"]["prompt_tokens"].as_u64().unwrap_or(0);
    let completion_tokens = value["usage"]["completion_tokens"].as_u64().unwrap_or(0);
    Ok(RawCompletion {
        response_text,
        prompt_tokens,
        completion_tokens,
    })
}

enum ClientMode {
    Live(HttpBackend),
    Replay(TranscriptIndex),
    Custom(Box<dyn Backend>),
}

/// A chat client with three modes: live HTTP, transcript replay (network is
/// structurally impossible), and a caller-supplied backend for tests. Every
/// served exchange can be appended to a recording transcript.
pub struct LlmClient {
    model: String,
    temperature: f64,
    mode: ClientMode,
    recorder: Option<Arc<TranscriptWriter>>,
    run_id: String,
    seq: u64,
}

impl LlmClient {
    pub fn live(config: LlmConfig) -> Result<Self, LlmError> {
        let model = config.model.clone();
        let temperature = config.temperature;
        Ok(LlmClient {
            model,
            temperature,
            mode: ClientMode::Live(HttpBackend::new(config)?),
            recorder: None,
            run_id: String::new(),
            seq: 0,
        })
    }

    /// Replay from a transcript; `config` supplies the model and temperature
    /// that fingerprints were recorded under.
    pub fn replay(config: &LlmConfig, path: &std::path::Path) -> Result<Self, LlmError> {
        Ok(LlmClient {
            model: config.model.clone(),
            temperature: config.temperature,
            mode: ClientMode::Replay(TranscriptIndex::load(path)?),
            recorder: None,
            run_id: String::new(),
            seq: 0,
        })
    }

    /// Serve from an arbitrary backend (scripted responders in tests).
    pub fn with_backend(config: &LlmConfig, backend: Box<dyn Backend>) -> Self {
        LlmClient {
            model: config.model.clone(),
            temperature: config.temperature,
            mode: ClientMode::Custom(backend),
            recorder: None,
            run_id: String::new(),
            seq: 0,
        }
    }

    pub fn record_to(mut self, writer: Arc<TranscriptWriter>) -> Self {
        self.recorder = Some(writer);
        self
    }

    pub fn is_replay(&self) -> bool {
        matches!(self.mode, ClientMode::Replay(_))
    }

    /// Tag subsequent exchanges with a run id; resets the sequence counter.
    pub fn set_run(&mut self, run_id: impl Into<String>) {
        self.run_id = run_id.into();
        self.seq = 0;
    }

    /// One chat completion. In replay mode this is a pure lookup; a miss is
    /// an error, never a live call.
    pub fn complete(
        &mut self,
        system_text: &str,
        user_text: &str,
    ) -> Result<ChatExchange, LlmError> {
        let fingerprint =
            request_fingerprint(system_text, user_text, &self.model, self.temperature);
        let raw = match &mut self.mode {
            ClientMode::Live(backend) => backend.complete(system_text, user_text)?,
            ClientMode::Custom(backend) => backend.complete(system_text, user_text)?,
            ClientMode::Replay(index) => {
                let entry = index.lookup(&fingerprint)?;
                RawCompletion {
                    response_text: entry.response,
                    prompt_tokens: entry.prompt_tokens,
                    completion_tokens: entry.completion_tokens,
                }
            }
        };
        let exchange = ChatExchange {
            system_text: system_text.to_string(),
            user_text: user_text.to_string(),
            response_text: raw.response_text,
            prompt_tokens: raw.prompt_tokens,
            completion_tokens: raw.completion_tokens,
            request_fingerprint: fingerprint,
        };
        if let Some(recorder) = &self.recorder {
            recorder.append(&TranscriptEntry {
                run_id: self.run_id.clone(),
                seq: self.seq,
                fingerprint: exchange.request_fingerprint.clone(),
                system: exchange.system_text.clone(),
                user: exchange.user_text.clone(),
                response: exchange.response_text.clone(),
                prompt_tokens: exchange.prompt_tokens,
                completion_tokens: exchange.completion_tokens,
            })?;
        }
        self.seq += 1;
        Ok(exchange)
    }
}
