use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply_stop_sequences, prompt_tail, Backend, CallContext, DecodingParams, LlmError};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("script is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule {rule}: bad pattern: {source}")]
    Pattern {
        rule: usize,
        #[source]
        source: regex::Error,
    },
    #[error("reading script {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// When a rule fires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Matcher {
    /// A specific step of an acting call; `trial` omitted means any trial.
    Index {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trial: Option<u32>,
        step: u32,
    },
    /// A regular expression searched in the prompt after the task marker.
    Pattern { pattern: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    #[serde(rename = "match")]
    pub matcher: Matcher,
    pub response: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScriptDocument {
    Rules(Vec<Rule>),
    Full {
        rules: Vec<Rule>,
        #[serde(default)]
        default: String,
    },
}

/// Ordered response rules; the first match wins.
#[derive(Debug, Clone)]
pub struct Script {
    rules: Vec<Rule>,
    patterns: Vec<Option<Regex>>,
    default_response: String,
}

impl Script {
    pub fn new(rules: Vec<Rule>, default_response: impl Into<String>) -> Result<Self, ScriptError> {
        let patterns = rules
            .iter()
            .enumerate()
            .map(|(i, r)| match &r.matcher {
                Matcher::Pattern { pattern } => Regex::new(pattern)
                    .map(Some)
                    .map_err(|source| ScriptError::Pattern { rule: i, source }),
                Matcher::Index { .. } => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { rules, patterns, default_response: default_response.into() })
    }

    /// Step `i` of every trial answers `lines[i]`; later steps get `default`.
    pub fn sequence<I, S>(lines: I, default_response: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let rules = lines
            .into_iter()
            .enumerate()
            .map(|(i, l)| Rule {
                matcher: Matcher::Index { trial: None, step: i as u32 },
                response: l.into(),
            })
            .collect();
        Self::new(rules, default_response).expect("index rules always compile")
    }

    /// Accepts either a bare rule list or `{"rules": [...], "default": "..."}`.
    pub fn from_json(text: &str) -> Result<Self, ScriptError> {
        match serde_json::from_str(text)? {
            ScriptDocument::Rules(rules) => Self::new(rules, ""),
            ScriptDocument::Full { rules, default } => Self::new(rules, default),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ScriptError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScriptError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_response(&self) -> &str {
        &self.default_response
    }

    /// The response for this call.
    pub fn respond(&self, prompt: &str, call: &CallContext) -> &str {
        let tail = prompt_tail(prompt);
        for (rule, pattern) in self.rules.iter().zip(&self.patterns) {
            let hit = match (&rule.matcher, pattern) {
                (Matcher::Index { trial, step }, _) => {
                    call.step == Some(*step) && trial.is_none_or(|t| t == call.trial)
                }
                (Matcher::Pattern { .. }, Some(re)) => re.is_match(tail),
                (Matcher::Pattern { .. }, None) => false,
            };
            if hit {
                return &rule.response;
            }
        }
        &self.default_response
    }
}

impl Serialize for Script {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            rules: &'a [Rule],
            default: &'a str,
        }
        Doc { rules: &self.rules, default: &self.default_response }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Script {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (rules, default) = match ScriptDocument::deserialize(deserializer)? {
            ScriptDocument::Rules(rules) => (rules, String::new()),
            ScriptDocument::Full { rules, default } => (rules, default),
        };
        Script::new(rules, default).map_err(serde::de::Error::custom)
    }
}

/// Replays a [`Script`].
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    script: Script,
}

impl ScriptedBackend {
    pub fn new(script: Script) -> Self {
        Self { script }
    }
}

impl Backend for ScriptedBackend {
    fn complete(&self, prompt: &str, params: &DecodingParams, call: &CallContext) -> Result<String, LlmError> {
        Ok(apply_stop_sequences(self.script.respond(prompt, call), &params.stop_sequences))
    }
}
