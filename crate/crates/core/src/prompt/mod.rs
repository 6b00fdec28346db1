//! Prompt assembly and completion parsing.
//!
//! An assembled prompt is a sequence of blocks separated by single blank
//! lines:
//!
//! ```text
//! <header>
//!
//! <react exemplar 1>
//!
//! <react exemplar 2>
//!
//! [<reflexion exemplar 1>
//!
//! <reflexion exemplar 2>
//!
//! ]Here is the task.
//!
//! [<adaptation 1>
//!
//! ...]<receptacle listing>
//! Your task is to: <goal>.
//! > 
//! ```
//!
//! The final `> ` cue asks the model for its next thought or action.

mod exemplar;

pub use exemplar::{
    file_name, load_exemplars, parse_exemplar_file, Exemplar, ExemplarError, ExemplarKind,
    ExemplarStore,
};

use serde::{Deserialize, Serialize};

use crate::textworld::World;

pub const DEFAULT_HEADER: &str = "Interact with a household to solve a task. Here are two examples.";
pub const TASK_MARKER: &str = "Here is the task.";
pub const BLOCK_SEPARATOR: &str = "\n\n";
pub const CUE: &str = "> ";

/// Where accumulated adaptations sit relative to the task description.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptationPlacement {
    /// Between the task marker and the receptacle listing.
    #[default]
    AboveTask,
    /// After the goal sentence.
    AfterTask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub header: String,
    pub react_exemplars: Vec<Exemplar>,
    /// Empty, or the two reflexion exemplars for the task type.
    pub reflexion_exemplars: Vec<Exemplar>,
    pub task_text: String,
    /// Extracted reflections, oldest first.
    pub adaptations: Vec<String>,
    pub placement: AdaptationPlacement,
}

impl PromptBundle {
    /// Bundle for `world`'s task with the default header, both react
    /// exemplars, and the reflexion exemplars when `with_reflexion` is set.
    pub fn for_world(store: &ExemplarStore, world: &World, with_reflexion: bool) -> Self {
        let task_type = world.task().task_type;
        Self {
            header: DEFAULT_HEADER.to_string(),
            react_exemplars: store.get(task_type, ExemplarKind::React).to_vec(),
            reflexion_exemplars: if with_reflexion {
                store.get(task_type, ExemplarKind::Reflexion).to_vec()
            } else {
                Vec::new()
            },
            task_text: world.initial_observation(),
            adaptations: Vec::new(),
            placement: AdaptationPlacement::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.react_exemplars.len() != 2 {
            return Err(format!("expected 2 react exemplars, got {}", self.react_exemplars.len()));
        }
        if !matches!(self.reflexion_exemplars.len(), 0 | 2) {
            return Err(format!(
                "expected 0 or 2 reflexion exemplars, got {}",
                self.reflexion_exemplars.len()
            ));
        }
        let task_type = self.react_exemplars[0].task_type;
        let exemplars = self.react_exemplars.iter().chain(&self.reflexion_exemplars);
        if exemplars.clone().any(|e| e.task_type != task_type) {
            return Err("exemplars mix task types".into());
        }
        if self.react_exemplars.iter().any(|e| e.kind != ExemplarKind::React)
            || self.reflexion_exemplars.iter().any(|e| e.kind != ExemplarKind::Reflexion)
        {
            return Err("exemplar kinds are out of place".into());
        }
        Ok(())
    }

    /// Everything up to, but excluding, the `> ` cue. Trajectory blocks are
    /// appended to this text during a trial.
    pub fn context(&self) -> String {
        let mut blocks: Vec<&str> = Vec::with_capacity(8 + self.adaptations.len());
        blocks.push(&self.header);
        blocks.extend(self.react_exemplars.iter().map(|e| e.body.as_str()));
        blocks.extend(self.reflexion_exemplars.iter().map(|e| e.body.as_str()));
        blocks.push(TASK_MARKER);
        let adaptations = self.adaptations.iter().map(String::as_str);
        match self.placement {
            AdaptationPlacement::AboveTask => {
                blocks.extend(adaptations);
                blocks.push(&self.task_text);
            }
            AdaptationPlacement::AfterTask => {
                blocks.push(&self.task_text);
                blocks.extend(adaptations);
            }
        }
        let mut out = blocks.join(BLOCK_SEPARATOR);
        out.push('\n');
        out
    }
}

/// Renders the full prompt, ending with the `> ` cue.
pub fn assemble(bundle: &PromptBundle) -> String {
    let mut out = bundle.context();
    out.push_str(CUE);
    out
}

/// The model's next line: the first line of the continuation with a leading
/// `>` cue stripped and whitespace trimmed. With `echo` set, `completion` is
/// expected to start with `prompt`, which is removed first.
pub fn extract_next_line(completion: &str, prompt: &str, echo: bool) -> String {
    let continuation = if echo {
        completion.strip_prefix(prompt).unwrap_or(completion)
    } else {
        completion
    };
    let first = continuation.lines().next().unwrap_or("");
    let first = first.trim();
    first.strip_prefix('>').unwrap_or(first).trim().to_string()
}

/// Character count, the unit reported for prompt lengths.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}
