//! The single-model act / reflect / compress loop.
//!
//! One trial feeds the model the assembled prompt plus the trajectory so
//! far, one emitted line per step. Thought lines get `OK.` without touching
//! the world, blank lines get `Nothing happens.`, everything else is parsed
//! and executed. Every emission costs one step. A trial ends on reward 1
//! or after `max_steps` steps. After a failed trial the model continues
//! the failed transcript past `STATUS: FAIL` / `New plan: `; the extracted
//! reflection is added to the original prompt (the failed trajectory is
//! dropped) and the world is rebuilt for the next trial.

pub mod log;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{Backend, CallContext, DecodingParams, LlmError};
use crate::prompt::{char_len, extract_next_line, PromptBundle, CUE};
use crate::textworld::{goal_satisfied, parse_action, Event, World};

pub use self::log::{JsonlSink, LogEvent, MemorySink, NullSink, TrajectorySink};

pub const THOUGHT_OBSERVATION: &str = "OK.";
pub const FAILURE_STATUS: &str = "STATUS: FAIL";
pub const REFLECTION_CUE: &str = "New plan: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_steps: u32,
    pub max_trials: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_steps: 49, max_trials: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Thought,
    Action,
    Blank,
}

pub fn classify_output(line: &str) -> OutputKind {
    let line = line.trim();
    if line.is_empty() {
        OutputKind::Blank
    } else if line.starts_with("think:") {
        OutputKind::Thought
    } else {
        OutputKind::Action
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: u32,
    pub kind: OutputKind,
    pub line: String,
    pub observation: String,
    pub reward: u8,
}

impl StepRecord {
    /// `> {line}\n{observation}\n`, the exemplar rendering.
    pub fn render(&self) -> String {
        format!("> {}\n{}\n", self.line, self.observation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    StepCapReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub ep: u32,
    pub steps: Vec<StepRecord>,
    pub outcome: TrialOutcome,
    /// The reflection extracted after this trial failed, if any.
    pub adaptation: Option<String>,
    /// Length in characters of the prompt at the trial's first step.
    pub prompt_chars: usize,
}

impl TrialRecord {
    pub fn step_count(&self) -> u32 {
        self.steps.len() as u32
    }

    /// The trial's step blocks, without the leading prompt.
    pub fn trajectory_text(&self) -> String {
        self.steps.iter().map(StepRecord::render).collect()
    }
}

/// Step total in the reporting convention: a count on success, `fail` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalSteps {
    Steps(u32),
    Fail,
}

impl std::fmt::Display for TotalSteps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TotalSteps::Steps(n) => write!(f, "{n}"),
            TotalSteps::Fail => f.write_str("fail"),
        }
    }
}

impl Serialize for TotalSteps {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TotalSteps::Steps(n) => s.serialize_u32(*n),
            TotalSteps::Fail => s.serialize_str("fail"),
        }
    }
}

impl<'de> Deserialize<'de> for TotalSteps {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(TotalSteps::Steps(n)),
            Raw::Word(w) if w == "fail" => Ok(TotalSteps::Fail),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("expected a count or `fail`, got `{w}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub trials: Vec<TrialRecord>,
    pub success: bool,
    pub total_steps: TotalSteps,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("backend failed during trial {trial}: {source}")]
    Backend {
        trial: u32,
        #[source]
        source: LlmError,
    },
    #[error("invalid prompt bundle: {0}")]
    Bundle(String),
}

/// A finished trial plus the transcript its failure prompt is built from.
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub record: TrialRecord,
    /// Prompt context followed by every step block, without a trailing cue.
    pub transcript: String,
}

/// `transcript` + `STATUS: FAIL` + `New plan: ` (no trailing newline).
pub fn build_failure_prompt(transcript: &str) -> String {
    let mut out = String::with_capacity(transcript.len() + 32);
    out.push_str(transcript);
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str(FAILURE_STATUS);
    out.push('\n');
    out.push_str(REFLECTION_CUE);
    out
}

/// The first paragraph of a reflection completion, trimmed.
pub fn extract_reflection(completion: &str) -> String {
    completion
        .trim_start()
        .lines()
        .take_while(|l| !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join("\n")
        .trim()
        .to_string()
}

/// The next trial's bundle: the same prompt plus one more adaptation.
/// An empty adaptation leaves the bundle unchanged.
pub fn compress(bundle: &PromptBundle, adaptation: &str) -> PromptBundle {
    let mut next = bundle.clone();
    if !adaptation.is_empty() {
        next.adaptations.push(adaptation.to_string());
    }
    next
}

pub struct Agent<'a> {
    backend: &'a dyn Backend,
    limits: Limits,
    acting: DecodingParams,
    reflecting: DecodingParams,
    sink: &'a dyn TrajectorySink,
}

impl<'a> Agent<'a> {
    pub fn new(backend: &'a dyn Backend, limits: Limits) -> Self {
        Self {
            backend,
            limits,
            acting: DecodingParams::acting(),
            reflecting: DecodingParams::reflecting(),
            sink: &NullSink,
        }
    }

    pub fn with_sink(mut self, sink: &'a dyn TrajectorySink) -> Self {
        self.sink = sink;
        self
    }

    pub fn with_params(mut self, acting: DecodingParams, reflecting: DecodingParams) -> Self {
        self.acting = acting;
        self.reflecting = reflecting;
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Runs one trial on a fresh `world`.
    pub fn run_trial(
        &self,
        task_id: &str,
        ep: u32,
        world: &mut World,
        bundle: &PromptBundle,
    ) -> Result<TrialRun, LlmError> {
        let mut transcript = bundle.context();
        let prompt_chars = char_len(&transcript) + char_len(CUE);
        let mut steps = Vec::new();
        let nothing = world.catalog().template(Event::Nothing).to_string();

        let mut outcome = if goal_satisfied(world) { TrialOutcome::Success } else { TrialOutcome::StepCapReached };
        let mut k = 0;
        while outcome != TrialOutcome::Success && k < self.limits.max_steps {
            let base = transcript.len();
            transcript.push_str(CUE);
            let chars = char_len(&transcript);
            let completion = self.backend.complete(
                &transcript,
                &self.acting,
                &CallContext::act(task_id, ep, k),
            );
            transcript.truncate(base);
            let line = extract_next_line(&completion?, "", false);

            let kind = classify_output(&line);
            let (observation, reward) = match kind {
                OutputKind::Thought => (THOUGHT_OBSERVATION.to_string(), 0),
                OutputKind::Blank => (nothing.clone(), 0),
                OutputKind::Action => match parse_action(&line) {
                    Ok(action) => {
                        let obs = world.step(&action).expect("stepping stops once the goal is reached");
                        (obs.text, obs.reward)
                    }
                    Err(_) => (nothing.clone(), 0),
                },
            };
            let step = StepRecord { k, kind, line, observation, reward };
            transcript.push_str(&step.render());
            self.sink.record(&LogEvent::Step {
                task_id: task_id.to_string(),
                ep,
                k,
                kind,
                line: step.line.clone(),
                observation: step.observation.clone(),
                reward,
                prompt_chars: chars,
            });
            steps.push(step);
            if reward == 1 {
                outcome = TrialOutcome::Success;
            }
            k += 1;
        }
        Ok(TrialRun {
            record: TrialRecord { ep, steps, outcome, adaptation: None, prompt_chars },
            transcript,
        })
    }

    /// Runs trials until success or the trial cap, reflecting and
    /// compressing after each failure. `world_factory` must return
    /// identical fresh worlds.
    pub fn run_task(
        &self,
        task_id: &str,
        world_factory: impl Fn() -> World,
        bundle: &PromptBundle,
    ) -> Result<TaskRecord, AgentError> {
        bundle.validate().map_err(AgentError::Bundle)?;
        let mut bundle = bundle.clone();
        let mut trials = Vec::new();
        let mut success = false;

        for ep in 1..=self.limits.max_trials {
            let mut world = world_factory();
            let run = self
                .run_trial(task_id, ep, &mut world, &bundle)
                .map_err(|source| AgentError::Backend { trial: ep, source })?;
            let mut record = run.record;
            if record.outcome == TrialOutcome::Success {
                success = true;
            } else {
                let failure_prompt = build_failure_prompt(&run.transcript);
                let completion = self
                    .backend
                    .complete(&failure_prompt, &self.reflecting, &CallContext::reflect(task_id, ep))
                    .map_err(|source| AgentError::Backend { trial: ep, source })?;
                let reflection = extract_reflection(&completion);
                bundle = compress(&bundle, &reflection);
                record.adaptation = (!reflection.is_empty()).then_some(reflection);
            }
            self.sink.record(&LogEvent::Trial {
                task_id: task_id.to_string(),
                ep,
                outcome: record.outcome,
                steps: record.step_count(),
                prompt_chars: record.prompt_chars,
                adaptation: record.adaptation.clone(),
            });
            trials.push(record);
            if success {
                break;
            }
        }

        let total_steps = if success {
            TotalSteps::Steps(trials.iter().map(TrialRecord::step_count).sum())
        } else {
            TotalSteps::Fail
        };
        self.sink.record(&LogEvent::Task {
            task_id: task_id.to_string(),
            success,
            total_steps,
            trials: trials.len() as u32,
            error: None,
        });
        Ok(TaskRecord { task_id: task_id.to_string(), trials, success, total_steps })
    }
}
