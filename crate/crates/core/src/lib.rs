//! A single language model that acts, reflects on failure and retries,
//! played against a deterministic household text game.
//!
//! - [`textworld`]: the game, its action grammar and a breadth-first solver.
//! - [`prompt`]: exemplars and prompt assembly.
//! - [`llm`]: the completion backend trait with scripted, persona, oracle
//!   and HTTP implementations.
//! - [`agent`]: the trial loop, failure prompting, reflection and compression.
//! - [`harness`]: suite configuration, runs, logs and reports.

pub mod agent;
pub mod harness;
pub mod llm;
pub mod prompt;
pub mod textworld;

pub use agent::{
    build_failure_prompt, classify_output, compress, extract_reflection, Agent, Limits, OutputKind, StepRecord,
    TaskRecord, TotalSteps, TrialOutcome, TrialRecord,
};
pub use harness::{emit_report, run_suite, ReportFormat, SuiteConfig, SuiteReport};
pub use llm::{Backend, CallContext, DecodingParams, LlmError, Purpose};
pub use prompt::{assemble, extract_next_line, ExemplarStore, PromptBundle};
pub use textworld::{
    format_action, goal_satisfied, load_world, parse_action, solve_oracle, Action, ObjectId, Observation,
    ReceptacleId, TaskSpec, TaskType, World,
};
