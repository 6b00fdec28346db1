//! The policy as a text-completion interface.
//!
//! Every backend answers [`Backend::complete`] with the bare continuation
//! of the prompt (never an echo of it). Scripted, persona and oracle
//! backends are pure functions of their inputs, so whole runs replay
//! byte-for-byte; [`remote::RemoteBackend`] talks to an HTTP inference
//! service.

mod oracle;
mod persona;
pub mod remote;
mod retry;
mod script;

pub use oracle::{decomposition_thought, make_oracle_backend, OracleBackend, OracleError};
pub use persona::{make_persona_backend, Persona, PersonaBackend, PersonaError, PersonaScenario};
pub use remote::{ApiStyle, RemoteBackend, RemoteConfig};
pub use retry::RetryPolicy;
pub use script::{Matcher, Rule, Script, ScriptError, ScriptedBackend};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::TASK_MARKER;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    /// 0 means greedy decoding.
    pub temperature: f64,
    pub max_new_tokens: u32,
    #[serde(default)]
    pub stop_sequences: Vec<String>,
}

impl DecodingParams {
    /// One line per call, greedy.
    pub fn acting() -> Self {
        Self { temperature: 0.0, max_new_tokens: 128, stop_sequences: vec!["\n".into()] }
    }

    /// Multi-sentence reflections, greedy, no stop sequence.
    pub fn reflecting() -> Self {
        Self { temperature: 0.0, max_new_tokens: 256, stop_sequences: Vec::new() }
    }
}

/// Why the agent is calling the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purpose {
    Act,
    Reflect,
}

/// Identifies a call within a task run. Scripted backends use it as their
/// cursor, so one backend value can serve many concurrent episodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallContext {
    pub episode: String,
    /// 1-based trial number.
    pub trial: u32,
    /// 0-based step within the trial; `None` for reflection calls.
    pub step: Option<u32>,
    pub purpose: Purpose,
}

impl CallContext {
    pub fn act(episode: &str, trial: u32, step: u32) -> Self {
        Self { episode: episode.to_string(), trial, step: Some(step), purpose: Purpose::Act }
    }

    pub fn reflect(episode: &str, trial: u32) -> Self {
        Self { episode: episode.to_string(), trial, step: None, purpose: Purpose::Reflect }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlmError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("service answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response body: {0}")]
    MalformedResponse(String),
    #[error("deadline of {deadline_ms} ms exceeded")]
    DeadlineExceeded { deadline_ms: u64 },
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: Box<LlmError> },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl LlmError {
    pub fn is_retriable(&self) -> bool {
        match self {
            LlmError::Transport(_) => true,
            LlmError::Status { status, .. } => matches!(status, 408 | 429 | 500..=599),
            _ => false,
        }
    }
}

pub trait Backend: Send + Sync {
    /// Continues `prompt`, returning only the newly generated text.
    fn complete(
        &self,
        prompt: &str,
        params: &DecodingParams,
        call: &CallContext,
    ) -> Result<String, LlmError>;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn complete(&self, prompt: &str, params: &DecodingParams, call: &CallContext) -> Result<String, LlmError> {
        (**self).complete(prompt, params, call)
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn complete(&self, prompt: &str, params: &DecodingParams, call: &CallContext) -> Result<String, LlmError> {
        (**self).complete(prompt, params, call)
    }
}

/// Cuts `text` at the earliest stop sequence.
pub fn apply_stop_sequences(text: &str, stops: &[String]) -> String {
    let cut = stops
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| text.find(s.as_str()))
        .min()
        .unwrap_or(text.len());
    text[..cut].to_string()
}

/// The live part of a prompt: everything after the last task marker.
pub fn prompt_tail(prompt: &str) -> &str {
    match prompt.rfind(TASK_MARKER) {
        Some(at) => &prompt[at + TASK_MARKER.len()..],
        None => prompt,
    }
}

/// Whether the prompt asks for a reflection: its last non-empty line ends
/// with the `New plan:` cue.
pub fn is_reflection_cue(prompt: &str) -> bool {
    prompt
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_end().ends_with("New plan:"))
}
