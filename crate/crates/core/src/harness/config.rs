//! Suite configuration files.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::SuiteError;
use crate::agent::Limits;
use crate::llm::{Persona, RemoteConfig};
use crate::prompt::AdaptationPlacement;
use crate::textworld::DEFAULT_ORACLE_DEPTH;

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_depth() -> usize {
    DEFAULT_ORACLE_DEPTH
}

/// Which policy drives the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    /// Replays the solver's plan after `thoughts` think lines.
    Oracle {
        #[serde(default = "one")]
        thoughts: usize,
        #[serde(default = "default_depth")]
        max_depth: usize,
    },
    /// One script for every task, or each scenario's own `script` when unset.
    Scripted {
        #[serde(default)]
        script: Option<PathBuf>,
    },
    /// A named persona; behavior data from `scenario` or each scenario's `persona` file.
    Persona {
        name: Persona,
        #[serde(default)]
        scenario: Option<PathBuf>,
    },
    Remote(RemoteConfig),
}

impl FromStr for BackendSpec {
    type Err = SuiteError;

    /// `oracle`, `remote`, `scripted[:<script>]` or `persona:<name>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("oracle", None) => Ok(BackendSpec::Oracle { thoughts: 1, max_depth: DEFAULT_ORACLE_DEPTH }),
            ("remote", None) => Ok(BackendSpec::Remote(RemoteConfig::default())),
            ("scripted", arg) => Ok(BackendSpec::Scripted { script: arg.map(PathBuf::from) }),
            ("persona", Some(name)) => Ok(BackendSpec::Persona {
                name: name.parse().map_err(|e| SuiteError::Config(format!("{e}")))?,
                scenario: None,
            }),
            _ => Err(SuiteError::Config(format!(
                "bad backend `{s}`; expected oracle, remote, scripted:<script> or persona:<name>"
            ))),
        }
    }
}

/// A world file, optionally with its task id and per-task behavior data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioEntry {
    Path(PathBuf),
    Detailed(Scenario),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub world: PathBuf,
    /// Defaults to the world file's stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<PathBuf>,
    /// Replaces the suite backend for this scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendSpec>,
}

impl ScenarioEntry {
    pub fn scenario(&self) -> Scenario {
        match self {
            ScenarioEntry::Path(p) => Scenario { world: p.clone(), task_id: None, script: None, persona: None, backend: None },
            ScenarioEntry::Detailed(s) => s.clone(),
        }
    }
}

impl Scenario {
    pub fn task_id(&self) -> String {
        self.task_id.clone().unwrap_or_else(|| {
            self.world
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.world.display().to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub scenarios: Vec<ScenarioEntry>,
    /// Built-in exemplars when unset.
    #[serde(default)]
    pub exemplar_dir: Option<PathBuf>,
    pub backend: BackendSpec,
    #[serde(default)]
    pub limits: Limits,
    /// No task starts once this much wall-clock time has passed, e.g. `"12h"`.
    #[serde(with = "humantime_serde")]
    pub wall_clock_budget: Duration,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed_note: String,
    #[serde(default = "one")]
    pub parallel: usize,
    /// Include the failing-then-reflecting exemplars from trial 1 on.
    #[serde(default = "yes")]
    pub reflexion_exemplars: bool,
    #[serde(default)]
    pub placement: AdaptationPlacement,
}

impl SuiteConfig {
    /// Parses `text`; relative input paths are taken relative to `base`,
    /// `output_dir` relative to the working directory.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, SuiteError> {
        let mut config: SuiteConfig =
            serde_json::from_str(text).map_err(|e| SuiteError::Config(format!("suite config: {e}")))?;
        config.resolve(base);
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, SuiteError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SuiteError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        if self.scenarios.is_empty() {
            return Err(SuiteError::Config("no scenarios".into()));
        }
        if self.wall_clock_budget.is_zero() {
            return Err(SuiteError::Config("wall_clock_budget must be positive".into()));
        }
        if self.limits.max_steps == 0 || self.limits.max_trials == 0 {
            return Err(SuiteError::Config("limits must be at least 1".into()));
        }
        if self.parallel == 0 {
            return Err(SuiteError::Config("parallel must be at least 1".into()));
        }
        Ok(())
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for entry in &mut self.scenarios {
            match entry {
                ScenarioEntry::Path(p) => join(p),
                ScenarioEntry::Detailed(s) => {
                    join(&mut s.world);
                    s.script.iter_mut().for_each(join);
                    s.persona.iter_mut().for_each(join);
                    if let Some(b) = &mut s.backend {
                        resolve_backend(b, &join);
                    }
                }
            }
        }
        self.exemplar_dir.iter_mut().for_each(join);
        resolve_backend(&mut self.backend, &join);
    }
}

fn resolve_backend(spec: &mut BackendSpec, join: &impl Fn(&mut PathBuf)) {
    match spec {
        BackendSpec::Scripted { script: Some(p) } => join(p),
        BackendSpec::Persona { scenario: Some(p), .. } => join(p),
        _ => {}
    }
}
