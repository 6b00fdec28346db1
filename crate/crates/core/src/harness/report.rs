//! Suite reports: a success-rate block and a per-task step column.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agent::{TaskRecord, TotalSteps};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task_id: String,
    pub success: bool,
    pub total_steps: TotalSteps,
    pub trials: u32,
    pub steps_per_trial: Vec<u32>,
    /// Set when the backend failed and the task could not finish.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskSummary {
    pub fn from_record(record: &TaskRecord) -> Self {
        Self {
            task_id: record.task_id.clone(),
            success: record.success,
            total_steps: record.total_steps,
            trials: record.trials.len() as u32,
            steps_per_trial: record.trials.iter().map(|t| t.step_count()).collect(),
            error: None,
        }
    }

    pub fn failed_with_error(task_id: &str, trials: u32, error: String) -> Self {
        Self {
            task_id: task_id.to_string(),
            success: false,
            total_steps: TotalSteps::Fail,
            trials,
            steps_per_trial: Vec::new(),
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub per_task: Vec<TaskSummary>,
    /// Rounded percentage of attempted tasks that succeeded.
    pub success_rate: u32,
    pub attempted: u32,
    pub succeeded: u32,
    pub budget_exhausted: bool,
    #[serde(default)]
    pub seed_note: String,
}

impl SuiteReport {
    pub fn new(per_task: Vec<TaskSummary>, budget_exhausted: bool, seed_note: String) -> Self {
        let attempted = per_task.len() as u32;
        let succeeded = per_task.iter().filter(|t| t.success).count() as u32;
        Self {
            success_rate: success_rate(succeeded, attempted),
            per_task,
            attempted,
            succeeded,
            budget_exhausted,
            seed_note,
        }
    }

    pub fn has_errors(&self) -> bool {
        self.per_task.iter().any(|t| t.error.is_some())
    }
}

/// `round(100 * succeeded / attempted)`, halves rounded up; 0 when nothing ran.
pub fn success_rate(succeeded: u32, attempted: u32) -> u32 {
    if attempted == 0 {
        return 0;
    }
    let (s, a) = (u64::from(succeeded), u64::from(attempted));
    ((200 * s + a) / (2 * a)) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}` (expected table or csv)")),
        }
    }
}

pub fn emit_report(report: &SuiteReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => table(report),
        ReportFormat::Csv => csv_text(report),
    }
}

const RATE: &str = "Success rate (%)";
const SUCCESSES: &str = "Successes";
const TASKS: &str = "Tasks";
const TASK: &str = "Task";
const STEPS: &str = "Steps";

fn table(report: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{RATE}  {SUCCESSES}  {TASKS}");
    if report.attempted > 0 {
        let _ = writeln!(
            out,
            "{:<w1$}  {:<w2$}  {}",
            report.success_rate,
            report.succeeded,
            report.attempted,
            w1 = RATE.len(),
            w2 = SUCCESSES.len()
        );
    }
    out.push('\n');
    let width = report.per_task.iter().map(|t| t.task_id.len()).max().unwrap_or(0).max(TASK.len());
    let _ = writeln!(out, "{TASK:<width$}  {STEPS}");
    for t in &report.per_task {
        let _ = writeln!(out, "{:<width$}  {}", t.task_id, t.total_steps);
    }
    out
}

fn csv_text(report: &SuiteReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, row: [&str; 10]| w.write_record(row).expect("writing to memory");
    write(
        &mut w,
        [
            "record",
            "task_id",
            "success",
            "total_steps",
            "trials",
            "error",
            "success_rate",
            "succeeded",
            "attempted",
            "budget_exhausted",
        ],
    );
    for t in &report.per_task {
        let steps = t.total_steps.to_string();
        let trials = t.trials.to_string();
        write(
            &mut w,
            [
                "task",
                &t.task_id,
                if t.success { "true" } else { "false" },
                &steps,
                &trials,
                t.error.as_deref().unwrap_or(""),
                "",
                "",
                "",
                "",
            ],
        );
    }
    let (rate, ok, all) = (report.success_rate.to_string(), report.succeeded.to_string(), report.attempted.to_string());
    write(
        &mut w,
        [
            "suite",
            "",
            "",
            "",
            "",
            "",
            &rate,
            &ok,
            &all,
            if report.budget_exhausted { "true" } else { "false" },
        ],
    );
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv is utf-8")
}
