//! OpenAI-compatible chat-completion client and the backend built on it.

use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    build_prompt, parse_response, BackendError, BackendKind, DecisionBackend, DecisionRequest, DecisionResponse,
    SYSTEM_PROMPT,
};
use crate::cognition::Persona;
use crate::engine::ConfigIssue;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    /// Base URL of the API, e.g. `https://api.openai.com/v1`; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key. The key itself
    /// is never stored in configuration.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub max_parallel: usize,
    pub backoff_base_ms: u64,
    pub temperature: f64,
    pub send_seed: bool,
    pub seed: u64,
    /// Ask the model to rewrite persona traits once a year.
    pub persona_updates: bool,
    /// Keep every prompt/response pair for the run store.
    pub record_transcripts: bool,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 60,
            max_retries: 3,
            max_parallel: 8,
            backoff_base_ms: 1000,
            temperature: 0.0,
            send_seed: true,
            seed: 0,
            persona_updates: true,
            record_transcripts: false,
        }
    }
}

impl LlmConfig {
    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        if self.endpoint.trim().is_empty() {
            out.push(ConfigIssue::new(format!("{prefix}.endpoint"), "required for the llm-http backend"));
        } else if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            out.push(ConfigIssue::new(format!("{prefix}.endpoint"), "must be an http(s) URL"));
        }
        if self.model.trim().is_empty() {
            out.push(ConfigIssue::new(format!("{prefix}.model"), "required for the llm-http backend"));
        }
        if self.api_key_env.trim().is_empty() {
            out.push(ConfigIssue::new(format!("{prefix}.api_key_env"), "must name an environment variable"));
        }
        if self.max_parallel == 0 {
            out.push(ConfigIssue::new(format!("{prefix}.max_parallel"), "must be >= 1"));
        }
        if self.timeout_secs == 0 {
            out.push(ConfigIssue::new(format!("{prefix}.timeout_secs"), "must be >= 1"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            out.push(ConfigIssue::new(format!("{prefix}.temperature"), "must be finite and >= 0"));
        }
    }
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

/// Blocking chat-completion client with exponential backoff.
pub struct ChatClient {
    http: reqwest::blocking::Client,
    url: String,
    model: String,
    api_key: String,
    temperature: f64,
    seed: Option<u64>,
    max_retries: u32,
    backoff_base: Duration,
    requests_sent: AtomicU64,
}

impl fmt::Debug for ChatClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChatClient")
            .field("url", &self.url)
            .field("model", &self.model)
            .field("api_key", &"<redacted>")
            .field("max_retries", &self.max_retries)
            .finish()
    }
}

#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: CompletionMessage,
}

#[derive(Deserialize)]
struct CompletionMessage {
    content: Option<String>,
}

impl ChatClient {
    pub fn new(cfg: &LlmConfig, api_key: String) -> Result<Self, BackendError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| BackendError::Config(format!("building HTTP client: {e}")))?;
        Ok(Self {
            http,
            url: format!("{}/chat/completions", cfg.endpoint.trim_end_matches('/')),
            model: cfg.model.clone(),
            api_key,
            temperature: cfg.temperature,
            seed: cfg.send_seed.then_some(cfg.seed),
            max_retries: cfg.max_retries,
            backoff_base: Duration::from_millis(cfg.backoff_base_ms),
            requests_sent: AtomicU64::new(0),
        })
    }

    /// Reads the API key from the configured environment variable.
    pub fn from_config(cfg: &LlmConfig) -> Result<Self, BackendError> {
        let key = std::env::var(&cfg.api_key_env).map_err(|_| BackendError::MissingApiKey(cfg.api_key_env.clone()))?;
        Self::new(cfg, key)
    }

    /// HTTP requests issued so far, including retries.
    pub fn requests_sent(&self) -> u64 {
        self.requests_sent.load(Ordering::Relaxed)
    }

    fn attempt(&self, system: &str, user: &str) -> Result<String, Attempt> {
        let mut body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.temperature,
        });
        if let Some(seed) = self.seed {
            body["seed"] = json!(seed);
        }
        self.requests_sent.fetch_add(1, Ordering::Relaxed);
        let resp = self
            .http
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| Attempt::Retry(format!("transport error: {e}")))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(format!("HTTP {status}")));
        }
        let parsed: CompletionBody =
            resp.json().map_err(|e| Attempt::Retry(format!("malformed completion body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Attempt::Retry("completion has no message content".into()))
    }

    fn backoff(&self, retry: u32) -> Duration {
        let base = self.backoff_base.mul_f64(2f64.powi(retry as i32));
        let jitter = rand::rng().random_range(0.0..=0.1);
        base + base.mul_f64(jitter)
    }

    /// Sends one chat completion and validates the reply with `check`,
    /// retrying transport errors, HTTP 429/5xx and validation failures.
    pub fn complete_with<T, E: fmt::Display>(
        &self,
        system: &str,
        user: &str,
        check: impl Fn(&str) -> Result<T, E>,
    ) -> Result<(String, T), BackendError> {
        let attempts = self.max_retries + 1;
        let mut last_error = String::new();
        for i in 0..attempts {
            if i > 0 {
                std::thread::sleep(self.backoff(i - 1));
            }
            match self.attempt(system, user) {
                Ok(text) => match check(&text) {
                    Ok(v) => return Ok((text, v)),
                    Err(e) => last_error = format!("unusable reply: {e}"),
                },
                Err(Attempt::Retry(e)) => last_error = e,
                Err(Attempt::Fatal(e)) => return Err(BackendError::Unavailable { attempts: i + 1, last_error: e }),
            }
            log::debug!("chat attempt {} of {attempts} failed: {last_error}", i + 1);
        }
        Err(BackendError::Unavailable { attempts, last_error })
    }

    /// Raw completion text, retried on transport and server errors.
    pub fn complete(&self, system: &str, user: &str) -> Result<String, BackendError> {
        self.complete_with(system, user, |_| Ok::<(), std::convert::Infallible>(())).map(|(t, _)| t)
    }
}

/// One prompt sent to the model and what came back.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    /// `None` for persona summaries.
    pub agent_id: Option<usize>,
    pub month_index: Option<u32>,
    pub prompt: String,
    pub response: Option<String>,
    pub error: Option<String>,
}

/// Decision backend that asks a chat model.
#[derive(Debug)]
pub struct LlmBackend {
    client: ChatClient,
    max_parallel: usize,
    persona_updates: bool,
    transcripts: Option<Mutex<Vec<Transcript>>>,
}

impl LlmBackend {
    pub fn new(cfg: &LlmConfig, client: ChatClient) -> Self {
        Self {
            client,
            max_parallel: cfg.max_parallel.max(1),
            persona_updates: cfg.persona_updates,
            transcripts: cfg.record_transcripts.then(|| Mutex::new(Vec::new())),
        }
    }

    pub fn from_config(cfg: &LlmConfig) -> Result<Self, BackendError> {
        Ok(Self::new(cfg, ChatClient::from_config(cfg)?))
    }

    pub fn client(&self) -> &ChatClient {
        &self.client
    }

    fn record(&self, t: Transcript) {
        if let Some(store) = &self.transcripts {
            store.lock().expect("transcript lock").push(t);
        }
    }
}

impl DecisionBackend for LlmBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::LlmHttp
    }

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError> {
        let prompt = build_prompt(request);
        let result = self.client.complete_with(SYSTEM_PROMPT, &prompt, parse_response);
        let (response, error) = match &result {
            Ok((text, _)) => (Some(text.clone()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        self.record(Transcript { agent_id: Some(request.agent_id), month_index: Some(request.month_index), prompt, response, error });
        result.map(|(_, d)| d)
    }

    fn decide_all(&self, requests: &[DecisionRequest]) -> Vec<Result<DecisionResponse, BackendError>> {
        let workers = self.max_parallel.min(requests.len()).max(1);
        let next = AtomicUsize::new(0);
        let mut results: Vec<(usize, Result<DecisionResponse, BackendError>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut done = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(req) = requests.get(i) else { break };
                            done.push((i, self.decide(req)));
                        }
                        done
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("decision worker panicked")).collect()
        });
        results.sort_by_key(|(i, _)| *i);
        results.into_iter().map(|(_, r)| r).collect()
    }

    fn summarize_persona(&self, persona: &Persona, observations: &str) -> Option<Result<String, BackendError>> {
        if !self.persona_updates {
            return None;
        }
        let prompt = format!(
            "Persona: {}, age {}, {}.\nCurrent traits: {}\nRecent experience:\n{}\n\n\
             Rewrite the traits as at most three sentences describing this person's economic situation, \
             habits and outlook. Reply with the sentences only.",
            persona.name,
            persona.age,
            persona.occupation,
            if persona.traits.is_empty() { "none" } else { &persona.traits },
            observations
        );
        let result = self.client.complete(SYSTEM_PROMPT, &prompt);
        self.record(Transcript {
            agent_id: None,
            month_index: None,
            prompt,
            response: result.as_ref().ok().cloned(),
            error: result.as_ref().err().map(|e| e.to_string()),
        });
        Some(result)
    }

    fn take_transcripts(&self) -> Vec<Transcript> {
        self.transcripts.as_ref().map(|m| std::mem::take(&mut *m.lock().expect("transcript lock"))).unwrap_or_default()
    }
}
