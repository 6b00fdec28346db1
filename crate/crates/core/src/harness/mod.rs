//! Runs scenario suites and writes logs and reports.
//!
//! A run directory holds `trajectory.jsonl` (one record per step, trial and
//! task) and `report.json`. Everything is prepared before the first task
//! starts, so configuration mistakes abort early; backend failures during
//! a task are recorded against that task and the suite carries on. The
//! wall-clock budget is checked only before a task starts.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use thiserror::Error;

use crate::agent::{Agent, AgentError, JsonlSink, LogEvent, TotalSteps, TrajectorySink};
use crate::llm::{
    make_oracle_backend, make_persona_backend, Backend, PersonaScenario, RemoteBackend, Script, ScriptedBackend,
};
use crate::prompt::{ExemplarStore, PromptBundle};
use crate::textworld::{load_world_file, World};

pub use config::{BackendSpec, Scenario, ScenarioEntry, SuiteConfig};
pub use report::{emit_report, success_rate, ReportFormat, SuiteReport, TaskSummary};

pub const TRAJECTORY_FILE: &str = "trajectory.jsonl";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io { path: path.display().to_string(), source }
}

/// A task ready to run: its fresh world, prompt and policy.
pub struct PreparedTask {
    pub task_id: String,
    pub world: World,
    pub bundle: PromptBundle,
    pub backend: Arc<dyn Backend>,
}

/// Loads every world, exemplar and backend the suite needs.
pub fn prepare(config: &SuiteConfig) -> Result<Vec<PreparedTask>, SuiteError> {
    config.validate()?;
    let store = match &config.exemplar_dir {
        Some(dir) => ExemplarStore::load(dir).map_err(|e| SuiteError::Config(e.to_string()))?,
        None => ExemplarStore::builtin(),
    };
    let mut shared_remote: Option<Arc<dyn Backend>> = None;
    let mut tasks = Vec::with_capacity(config.scenarios.len());
    for entry in &config.scenarios {
        let scenario = entry.scenario();
        let task_id = scenario.task_id();
        let world = load_world_file(&scenario.world)
            .map_err(|e| SuiteError::Config(format!("task {task_id}: {e}")))?;
        let mut bundle = PromptBundle::for_world(&store, &world, config.reflexion_exemplars);
        bundle.placement = config.placement;
        let backend = match &scenario.backend {
            Some(spec) => build_backend(spec, &scenario, &world)?,
            None if matches!(config.backend, BackendSpec::Remote(_)) => match &shared_remote {
                Some(b) => Arc::clone(b),
                None => {
                    let b = build_backend(&config.backend, &scenario, &world)?;
                    shared_remote = Some(Arc::clone(&b));
                    b
                }
            },
            None => build_backend(&config.backend, &scenario, &world)?,
        };
        tasks.push(PreparedTask { task_id, world, bundle, backend });
    }
    Ok(tasks)
}

fn build_backend(spec: &BackendSpec, scenario: &Scenario, world: &World) -> Result<Arc<dyn Backend>, SuiteError> {
    let task_id = scenario.task_id();
    let config_err = |e: String| SuiteError::Config(format!("task {task_id}: {e}"));
    Ok(match spec {
        BackendSpec::Oracle { thoughts, max_depth } => {
            Arc::new(make_oracle_backend(world, *thoughts, *max_depth).map_err(|e| config_err(e.to_string()))?)
        }
        BackendSpec::Scripted { script } => {
            let path = script
                .as_ref()
                .or(scenario.script.as_ref())
                .ok_or_else(|| config_err("scripted backend needs a script".into()))?;
            let script = Script::from_file(path).map_err(|e| config_err(e.to_string()))?;
            Arc::new(ScriptedBackend::new(script))
        }
        BackendSpec::Persona { name, scenario: file } => {
            let path = file
                .as_ref()
                .or(scenario.persona.as_ref())
                .ok_or_else(|| config_err(format!("persona {name} needs a persona file")))?;
            let data = PersonaScenario::from_file(path).map_err(|e| config_err(e.to_string()))?;
            Arc::new(make_persona_backend(*name, data).map_err(|e| config_err(e.to_string()))?)
        }
        BackendSpec::Remote(remote) => {
            let mut remote = remote.clone();
            remote.apply_env();
            Arc::new(RemoteBackend::new(remote).map_err(|e| config_err(e.to_string()))?)
        }
    })
}

/// Runs prepared tasks under `config`'s limits, budget and parallelism.
pub fn run_prepared(config: &SuiteConfig, tasks: Vec<PreparedTask>, sink: &dyn TrajectorySink) -> SuiteReport {
    let started = Instant::now();
    let next = AtomicUsize::new(0);
    let exhausted = AtomicBool::new(false);
    let results: Mutex<Vec<Option<TaskSummary>>> = Mutex::new(vec![None; tasks.len()]);
    let workers = config.parallel.clamp(1, tasks.len().max(1));

    let work = || loop {
        if exhausted.load(Ordering::SeqCst) {
            return;
        }
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some(task) = tasks.get(i) else { return };
        if started.elapsed() >= config.wall_clock_budget {
            exhausted.store(true, Ordering::SeqCst);
            return;
        }
        let summary = run_one(config, task, sink);
        results.lock().expect("results lock")[i] = Some(summary);
    };
    std::thread::scope(|s| {
        for _ in 1..workers {
            s.spawn(work);
        }
        work();
    });

    let per_task = results.into_inner().expect("results lock").into_iter().flatten().collect();
    SuiteReport::new(per_task, exhausted.load(Ordering::SeqCst), config.seed_note.clone())
}

fn run_one(config: &SuiteConfig, task: &PreparedTask, sink: &dyn TrajectorySink) -> TaskSummary {
    log::info!("starting task {}", task.task_id);
    let agent = Agent::new(task.backend.as_ref(), config.limits).with_sink(sink);
    match agent.run_task(&task.task_id, || task.world.clone(), &task.bundle) {
        Ok(record) => TaskSummary::from_record(&record),
        Err(e) => {
            log::warn!("task {} failed: {e}", task.task_id);
            let trials = match &e {
                AgentError::Backend { trial, .. } => *trial,
                AgentError::Bundle(_) => 0,
            };
            sink.record(&LogEvent::Task {
                task_id: task.task_id.clone(),
                success: false,
                total_steps: TotalSteps::Fail,
                trials,
                error: Some(e.to_string()),
            });
            TaskSummary::failed_with_error(&task.task_id, trials, e.to_string())
        }
    }
}

/// Prepares, runs and persists a suite; returns the report.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let tasks = prepare(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    let log_path = dir.join(TRAJECTORY_FILE);
    let sink = JsonlSink::create(&log_path).map_err(io_error(&log_path))?;
    let report = run_prepared(config, tasks, &sink);
    sink.flush().map_err(io_error(&log_path))?;
    write_report(dir, &report)?;
    Ok(report)
}

pub fn write_report(dir: &Path, report: &SuiteReport) -> Result<PathBuf, SuiteError> {
    let path = dir.join(REPORT_FILE);
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(io_error(&path))?;
    Ok(path)
}

pub fn read_report(run_dir: &Path) -> Result<SuiteReport, SuiteError> {
    let path = run_dir.join(REPORT_FILE);
    let text = std::fs::read_to_string(&path).map_err(io_error(&path))?;
    serde_json::from_str(&text).map_err(|e| SuiteError::Config(format!("{}: {e}", path.display())))
}
