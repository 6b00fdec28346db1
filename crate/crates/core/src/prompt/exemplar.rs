//! Exemplar files: `{task_type}.{kind}.txt`, two exemplars per file
//! separated by a line holding only `---`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textworld::TaskType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExemplarKind {
    /// Thoughts interleaved with actions.
    React,
    /// A trajectory closed by a `STATUS:` line and a reflection paragraph.
    Reflexion,
}

impl ExemplarKind {
    pub const ALL: [ExemplarKind; 2] = [ExemplarKind::React, ExemplarKind::Reflexion];

    pub fn slug(self) -> &'static str {
        match self {
            ExemplarKind::React => "react",
            ExemplarKind::Reflexion => "reflexion",
        }
    }
}

impl fmt::Display for ExemplarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exemplar {
    pub task_type: TaskType,
    pub kind: ExemplarKind,
    pub body: String,
}

#[derive(Debug, Error)]
pub enum ExemplarError {
    #[error("missing exemplar files: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("{file}: expected exactly 2 exemplars separated by `---`, found {found}")]
    Delimiter { file: String, found: usize },
    #[error("{file}: exemplar {index} (line {line}): {reason}")]
    Invariant { file: String, index: usize, line: usize, reason: String },
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn file_name(task_type: TaskType, kind: ExemplarKind) -> String {
    format!("{}.{}.txt", task_type.slug(), kind.slug())
}

/// Splits and validates one exemplar file.
pub fn parse_exemplar_file(
    file: &str,
    text: &str,
    task_type: TaskType,
    kind: ExemplarKind,
) -> Result<[Exemplar; 2], ExemplarError> {
    // (first line number, body)
    let mut parts: Vec<(usize, Vec<&str>)> = vec![(1, Vec::new())];
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            parts.push((i + 2, Vec::new()));
        } else {
            parts.last_mut().expect("non-empty").1.push(line);
        }
    }
    if parts.len() != 2 {
        return Err(ExemplarError::Delimiter { file: file.to_string(), found: parts.len() });
    }
    let mut out = Vec::with_capacity(2);
    for (index, (start, lines)) in parts.into_iter().enumerate() {
        let leading = lines.iter().take_while(|l| l.trim().is_empty()).count();
        let body = lines.join("\n").trim_matches(|c| c == '\n' || c == '\r').to_string();
        let invariant = |reason: &str| ExemplarError::Invariant {
            file: file.to_string(),
            index: index + 1,
            line: start + leading,
            reason: reason.to_string(),
        };
        if body.trim().is_empty() {
            return Err(invariant("exemplar is empty"));
        }
        match kind {
            ExemplarKind::React => {
                if !body.lines().any(|l| l.starts_with("> think:")) {
                    return Err(invariant("react exemplar has no `> think:` line"));
                }
            }
            ExemplarKind::Reflexion => {
                let lines: Vec<&str> = body.lines().collect();
                let Some(status) = lines.iter().rposition(|l| l.starts_with("STATUS:")) else {
                    return Err(invariant("reflexion exemplar has no `STATUS:` line"));
                };
                let reflection = &lines[status + 1..];
                if reflection.is_empty() || reflection.iter().any(|l| l.trim().is_empty()) {
                    return Err(invariant(
                        "reflexion exemplar must end with a single reflection paragraph after `STATUS:`",
                    ));
                }
            }
        }
        out.push(Exemplar { task_type, kind, body });
    }
    let second = out.pop().expect("two parts");
    let first = out.pop().expect("two parts");
    Ok([first, second])
}

macro_rules! builtin_files {
    ($($slug:literal),* $(,)?) => {
        [$(
            (
                concat!($slug, ".react.txt"),
                include_str!(concat!("../../data/exemplars/", $slug, ".react.txt")),
            ),
            (
                concat!($slug, ".reflexion.txt"),
                include_str!(concat!("../../data/exemplars/", $slug, ".reflexion.txt")),
            ),
        )*]
    };
}

const BUILTIN: [(&str, &str); 12] = builtin_files!(
    "pick_and_place",
    "examine_in_light",
    "clean_and_place",
    "heat_and_place",
    "cool_and_place",
    "pick_two_and_place",
);

/// Immutable map from (task type, kind) to that pair's two exemplars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExemplarStore {
    entries: BTreeMap<(TaskType, ExemplarKind), [Exemplar; 2]>,
}

impl ExemplarStore {
    /// The exemplar set compiled into the crate.
    pub fn builtin() -> Self {
        Self::from_files(|name| {
            BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, text)| Ok(text.to_string()))
        })
        .expect("builtin exemplars are valid")
    }

    /// Loads all twelve files from `dir`. Missing files are reported together.
    pub fn load(dir: &Path) -> Result<Self, ExemplarError> {
        Self::from_files(|name| {
            let path = dir.join(name);
            if !path.is_file() {
                return None;
            }
            Some(std::fs::read_to_string(&path).map_err(|source| ExemplarError::Io {
                file: path.display().to_string(),
                source,
            }))
        })
    }

    fn from_files<F>(mut read: F) -> Result<Self, ExemplarError>
    where
        F: FnMut(&str) -> Option<Result<String, ExemplarError>>,
    {
        let mut missing = Vec::new();
        let mut texts = Vec::new();
        for task_type in TaskType::ALL {
            for kind in ExemplarKind::ALL {
                let name = file_name(task_type, kind);
                match read(&name) {
                    None => missing.push(name),
                    Some(text) => texts.push((name, task_type, kind, text?)),
                }
            }
        }
        if !missing.is_empty() {
            return Err(ExemplarError::Missing(missing));
        }
        let mut entries = BTreeMap::new();
        for (name, task_type, kind, text) in texts {
            entries.insert((task_type, kind), parse_exemplar_file(&name, &text, task_type, kind)?);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, task_type: TaskType, kind: ExemplarKind) -> &[Exemplar; 2] {
        &self.entries[&(task_type, kind)]
    }
}

/// Convenience wrapper matching the directory-loading operation.
pub fn load_exemplars(dir: &Path) -> Result<ExemplarStore, ExemplarError> {
    ExemplarStore::load(dir)
}
