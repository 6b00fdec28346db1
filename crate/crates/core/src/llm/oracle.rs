//! A policy that replays the reference solver's plan.

use thiserror::Error;

use super::{Backend, CallContext, DecodingParams, LlmError, Purpose};
use crate::textworld::{solve_oracle, Capability, TaskType, World};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no plan within {max_depth} actions")]
    NoSolution { max_depth: usize },
}

/// Emits `thoughts` think lines, then the plan one action per call, then
/// empty text. Reflection calls get empty text.
#[derive(Debug, Clone)]
pub struct OracleBackend {
    lines: Vec<String>,
    plan_len: usize,
}

impl OracleBackend {
    pub fn plan_len(&self) -> usize {
        self.plan_len
    }

    pub fn thought_count(&self) -> usize {
        self.lines.len() - self.plan_len
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

/// Solves `world` and wraps the plan. The first thought decomposes the goal.
pub fn make_oracle_backend(
    world: &World,
    thoughts: usize,
    max_depth: usize,
) -> Result<OracleBackend, OracleError> {
    let plan = solve_oracle(world, max_depth).ok_or(OracleError::NoSolution { max_depth })?;
    let mut lines = Vec::with_capacity(thoughts + plan.len());
    for i in 0..thoughts {
        lines.push(if i == 0 {
            decomposition_thought(world)
        } else {
            "think: I will continue with the next step of my plan.".to_string()
        });
    }
    lines.extend(plan.iter().map(ToString::to_string));
    Ok(OracleBackend { lines, plan_len: plan.len() })
}

fn appliance_class(world: &World, capability: Capability, fallback: &str) -> String {
    world
        .receptacles()
        .find(|r| r.spec.capability == capability)
        .map(|r| r.spec.id.class().to_string())
        .unwrap_or_else(|| fallback.to_string())
}

/// `think: To solve the task, I need to ...` for the world's goal.
pub fn decomposition_thought(world: &World) -> String {
    let task = world.task();
    let obj = &task.object_class;
    let recep = task.receptacle.as_ref().map(|r| r.class().to_string()).unwrap_or_default();
    let a = indefinite(obj);
    let body = match task.task_type {
        TaskType::PickAndPlace => format!("find and take {a} {obj}, then put it in {recep}"),
        TaskType::ExamineInLight => format!(
            "find and take {a} {obj}, then find and use {lamp_a} {lamp}",
            lamp = task.lamp_class.as_deref().unwrap_or("lamp"),
            lamp_a = indefinite(task.lamp_class.as_deref().unwrap_or("lamp"))
        ),
        TaskType::CleanAndPlace => format!(
            "find and take {a} {obj}, then clean it with {}, then put it in {recep}",
            appliance_class(world, Capability::Cleaner, "sinkbasin")
        ),
        TaskType::HeatAndPlace => format!(
            "find and take {a} {obj}, then heat it with {}, then put it in {recep}",
            appliance_class(world, Capability::Heater, "microwave")
        ),
        TaskType::CoolAndPlace => format!(
            "find and take {a} {obj}, then cool it with {}, then put it in {recep}",
            appliance_class(world, Capability::Cooler, "fridge")
        ),
        TaskType::PickTwoAndPlace => format!(
            "find and take the first {obj}, then put it in {recep}, then find and take the second {obj}, then put it in {recep}"
        ),
    };
    format!("think: To solve the task, I need to {body}.")
}

fn indefinite(noun: &str) -> &'static str {
    if noun.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

impl Backend for OracleBackend {
    fn complete(&self, _prompt: &str, _params: &DecodingParams, call: &CallContext) -> Result<String, LlmError> {
        if call.purpose == Purpose::Reflect {
            return Ok(String::new());
        }
        let step = call.step.unwrap_or(0) as usize;
        Ok(self.lines.get(step).cloned().unwrap_or_default())
    }
}
