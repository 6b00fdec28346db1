//! Client for chat/completions-style JSON-over-HTTP inference services.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::retry::RetryPolicy;
use super::{Backend, CallContext, DecodingParams, LlmError};

pub const ENV_URL: &str = "RELOOPER_LLM_URL";
pub const ENV_MODEL: &str = "RELOOPER_LLM_MODEL";
pub const ENV_TOKEN: &str = "RELOOPER_LLM_TOKEN";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApiStyle {
    /// `{"prompt": ...}`, answer in `choices[0].text`.
    #[default]
    Completions,
    /// `{"messages": [...]}`, answer in `choices[0].message.content`.
    Chat,
}

fn default_timeout_ms() -> u64 {
    120_000
}

fn default_in_flight() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteConfig {
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub model: String,
    /// Normally supplied through `RELOOPER_LLM_TOKEN` rather than the file.
    #[serde(default, skip_serializing)]
    pub token: Option<String>,
    #[serde(default)]
    pub api: ApiStyle,
    /// Set when the service returns the prompt in front of the continuation.
    #[serde(default)]
    pub echo: bool,
    #[serde(default = "default_timeout_ms")]
    pub request_timeout_ms: u64,
    /// Upper bound on one `complete` call including retries.
    #[serde(default)]
    pub deadline_ms: Option<u64>,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            url: String::new(),
            model: String::new(),
            token: None,
            api: ApiStyle::default(),
            echo: false,
            request_timeout_ms: default_timeout_ms(),
            deadline_ms: None,
            max_in_flight: default_in_flight(),
            retry: RetryPolicy::default(),
        }
    }
}

impl RemoteConfig {
    /// Overrides url, model and token from the `RELOOPER_LLM_*` variables.
    pub fn apply_env(&mut self) {
        self.apply_vars(|k| std::env::var(k).ok());
    }

    pub fn apply_vars(&mut self, get: impl Fn(&str) -> Option<String>) {
        if let Some(url) = get(ENV_URL) {
            self.url = url;
        }
        if let Some(model) = get(ENV_MODEL) {
            self.model = model;
        }
        if let Some(token) = get(ENV_TOKEN) {
            self.token = Some(token);
        }
    }
}

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct RequestBody<'a> {
    model: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    prompt: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    messages: Option<[Message<'a>; 1]>,
    temperature: f64,
    max_tokens: u32,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    stop: &'a [String],
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct InFlight {
    limit: usize,
    active: Mutex<usize>,
    freed: Condvar,
}

impl InFlight {
    fn acquire(&self) -> InFlightGuard<'_> {
        let mut active = self.active.lock().expect("in-flight lock");
        while *active >= self.limit {
            active = self.freed.wait(active).expect("in-flight lock");
        }
        *active += 1;
        InFlightGuard(self)
    }
}

struct InFlightGuard<'a>(&'a InFlight);

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        *self.0.active.lock().expect("in-flight lock") -= 1;
        self.0.freed.notify_one();
    }
}

#[derive(Debug)]
pub struct RemoteBackend {
    config: RemoteConfig,
    agent: ureq::Agent,
    in_flight: InFlight,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Result<Self, LlmError> {
        if config.url.is_empty() {
            return Err(LlmError::InvalidRequest(format!("no endpoint url (set {ENV_URL})")));
        }
        if config.model.is_empty() {
            return Err(LlmError::InvalidRequest(format!("no model name (set {ENV_MODEL})")));
        }
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(config.request_timeout_ms))
            .build();
        let in_flight = InFlight {
            limit: config.max_in_flight.max(1),
            active: Mutex::new(0),
            freed: Condvar::new(),
        };
        Ok(Self { config, agent, in_flight })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// The exact JSON body sent for `prompt`.
    pub fn request_body(&self, prompt: &str, params: &DecodingParams) -> String {
        let body = RequestBody {
            model: &self.config.model,
            prompt: (self.config.api == ApiStyle::Completions).then_some(prompt),
            messages: (self.config.api == ApiStyle::Chat)
                .then_some([Message { role: "user", content: prompt }]),
            temperature: params.temperature,
            max_tokens: params.max_new_tokens,
            stop: &params.stop_sequences,
        };
        serde_json::to_string(&body).expect("request body serializes")
    }

    fn send_once(&self, body: &str) -> Result<String, LlmError> {
        let _slot = self.in_flight.acquire();
        let mut request = self.agent.post(&self.config.url).set("Content-Type", "application/json");
        if let Some(token) = &self.config.token {
            request = request.set("Authorization", &format!("Bearer {token}"));
        }
        match request.send_string(body) {
            Ok(response) => response
                .into_string()
                .map_err(|e| LlmError::Transport(format!("reading response: {e}"))),
            Err(ureq::Error::Status(status, response)) => Err(LlmError::Status {
                status,
                body: response.into_string().unwrap_or_default(),
            }),
            Err(ureq::Error::Transport(t)) => Err(LlmError::Transport(t.to_string())),
        }
    }

    fn parse_response(&self, text: &str) -> Result<String, LlmError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| LlmError::MalformedResponse(format!("{e}: {}", truncate(text))))?;
        let choice = value.pointer("/choices/0").ok_or_else(|| {
            LlmError::MalformedResponse(format!("no choices: {}", truncate(text)))
        })?;
        let content = match self.config.api {
            ApiStyle::Completions => choice.get("text"),
            ApiStyle::Chat => choice.pointer("/message/content"),
        };
        content
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| LlmError::MalformedResponse(format!("no completion text: {}", truncate(text))))
    }
}

fn truncate(text: &str) -> String {
    text.chars().take(200).collect()
}

impl Backend for RemoteBackend {
    fn complete(&self, prompt: &str, params: &DecodingParams, _call: &CallContext) -> Result<String, LlmError> {
        if prompt.is_empty() {
            return Err(LlmError::InvalidRequest("empty prompt".into()));
        }
        let body = self.request_body(prompt, params);
        let deadline = self.config.deadline_ms.map(Duration::from_millis);
        let raw = self.config.retry.run(deadline, || self.send_once(&body))?;
        let text = self.parse_response(&raw)?;
        Ok(if self.config.echo {
            text.strip_prefix(prompt).map(str::to_string).unwrap_or(text)
        } else {
            text
        })
    }
}
