//! Deterministic stand-ins for the observed failure modes of real models.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::script::Script;
use super::{apply_stop_sequences, is_reflection_cue, prompt_tail, Backend, CallContext, DecodingParams, LlmError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persona {
    /// Keeps retrying an action on an object that is not where it looks.
    LoopOnMissingObject,
    /// Picks up the wrong item and keeps working with it.
    WrongObject,
    /// Pursues subgoals in the wrong order and revisits searched places.
    SubgoalOrder,
    /// Falls silent and returns empty text.
    EmptyStall,
    /// Fails, reflects, then follows a corrected script once the
    /// reflection shows up in its prompt.
    FailThenAdapt,
}

impl Persona {
    pub const ALL: [Persona; 5] = [
        Persona::LoopOnMissingObject,
        Persona::WrongObject,
        Persona::SubgoalOrder,
        Persona::EmptyStall,
        Persona::FailThenAdapt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Persona::LoopOnMissingObject => "loop_on_missing_object",
            Persona::WrongObject => "wrong_object",
            Persona::SubgoalOrder => "subgoal_order",
            Persona::EmptyStall => "empty_stall",
            Persona::FailThenAdapt => "fail_then_adapt",
        }
    }
}

impl fmt::Display for Persona {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Persona {
    type Err = PersonaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Persona::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| PersonaError::UnknownPersona(s.to_string()))
    }
}

fn one() -> usize {
    1
}

/// Behavior data for a persona, usually loaded from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonaScenario {
    /// Optional label; checked against the requested persona when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<Persona>,
    /// Acting behavior before adaptation.
    pub acting: Script,
    /// Answer to every failure prompt; may be empty.
    #[serde(default)]
    pub reflection: String,
    /// Acting behavior once enough adaptations are present (fail_then_adapt only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected: Option<Script>,
    /// Number of adaptation blocks needed before switching to `corrected`.
    #[serde(default = "one")]
    pub adapt_after: usize,
}

impl PersonaScenario {
    pub fn from_file(path: &Path) -> Result<Self, PersonaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PersonaError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| PersonaError::Json(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersonaError {
    #[error("unknown persona `{0}`")]
    UnknownPersona(String),
    #[error("scenario is labelled `{labelled}` but was requested as `{requested}`")]
    LabelMismatch { labelled: Persona, requested: Persona },
    #[error("{persona} scenario is inconsistent: {reason}")]
    Inconsistent { persona: Persona, reason: String },
    #[error("persona scenario: {0}")]
    Json(String),
    #[error("reading persona scenario: {0}")]
    Io(String),
}

#[derive(Debug, Clone)]
pub struct PersonaBackend {
    persona: Persona,
    scenario: PersonaScenario,
}

impl PersonaBackend {
    pub fn persona(&self) -> Persona {
        self.persona
    }

    pub fn scenario(&self) -> &PersonaScenario {
        &self.scenario
    }

    /// How many times the reflection text appears as an adaptation block.
    fn adaptations_in(&self, prompt: &str) -> usize {
        if self.scenario.reflection.is_empty() {
            return 0;
        }
        prompt_tail(prompt).matches(self.scenario.reflection.as_str()).count()
    }
}

/// Builds a persona backend after checking the scenario fits the persona.
pub fn make_persona_backend(
    persona: Persona,
    scenario: PersonaScenario,
) -> Result<PersonaBackend, PersonaError> {
    if let Some(labelled) = scenario.persona {
        if labelled != persona {
            return Err(PersonaError::LabelMismatch { labelled, requested: persona });
        }
    }
    let inconsistent = |reason: &str| PersonaError::Inconsistent { persona, reason: reason.into() };
    match persona {
        Persona::FailThenAdapt => {
            if scenario.corrected.is_none() {
                return Err(inconsistent("a corrected script is required"));
            }
            if scenario.reflection.trim().is_empty() {
                return Err(inconsistent("a non-empty reflection is required"));
            }
            if scenario.adapt_after == 0 {
                return Err(inconsistent("adapt_after must be at least 1"));
            }
        }
        Persona::EmptyStall => {
            if !scenario.acting.default_response().is_empty() {
                return Err(inconsistent("the acting default response must be empty"));
            }
        }
        Persona::LoopOnMissingObject | Persona::WrongObject | Persona::SubgoalOrder => {
            if scenario.acting.default_response().trim().is_empty() {
                return Err(inconsistent("the acting default response is the repeated action"));
            }
        }
    }
    if persona != Persona::FailThenAdapt && scenario.corrected.is_some() {
        return Err(inconsistent("only fail_then_adapt uses a corrected script"));
    }
    Ok(PersonaBackend { persona, scenario })
}

impl Backend for PersonaBackend {
    fn complete(&self, prompt: &str, params: &DecodingParams, call: &CallContext) -> Result<String, LlmError> {
        if is_reflection_cue(prompt) {
            return Ok(self.scenario.reflection.clone());
        }
        let script = match &self.scenario.corrected {
            Some(corrected)
                if self.persona == Persona::FailThenAdapt
                    && self.adaptations_in(prompt) >= self.scenario.adapt_after =>
            {
                corrected
            }
            _ => &self.scenario.acting,
        };
        Ok(apply_stop_sequences(script.respond(prompt, call), &params.stop_sequences))
    }
}
