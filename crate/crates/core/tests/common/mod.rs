#![allow(dead_code)]

pub mod props;

use std::path::{Path, PathBuf};

use relooper_core::llm::{make_persona_backend, PersonaBackend, PersonaScenario};
use relooper_core::prompt::{ExemplarStore, PromptBundle};
use relooper_core::textworld::load_world_file;
use relooper_core::World;

pub const STEMS: [&str; 6] =
    ["task01_pick", "task02_examine", "task03_lettuce", "task04_heat", "task06_pillows", "task12_tomato"];

pub const TASK6_REFLECTION: &str = "I was stuck in a loop in which I continually looked for the second pillow in sofa 1. I should have looked for the second pillow in armchair 1, sidetable 1, and cabinet 1-4. I will try to execute a different action if I am stuck in a loop again.";
pub const TASK12_REFLECTION: &str = "I was stuck in a loop in which I continually looked for a tomato in the fridge. I should have looked for a tomato in a different environment. I will try to look for a tomato in a different environment in the next trial.";
pub const TASK3_REFLECTION: &str = "I was stuck in a loop in which I continually examined the fridge 1 instead of using a different action. I should have looked for a lettuce in the fridge 1, then taken it. I will try to execute a different action if I am stuck in a loop again.";

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn scenario_path(stem: &str) -> PathBuf {
    data_dir().join("scenarios").join(format!("{stem}.json"))
}

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn world(stem: &str) -> World {
    load_world_file(&scenario_path(stem)).unwrap_or_else(|e| panic!("{stem}: {e}"))
}

pub fn bundle(world: &World) -> PromptBundle {
    PromptBundle::for_world(&ExemplarStore::builtin(), world, true)
}

pub fn persona(stem: &str) -> PersonaBackend {
    let path = data_dir().join("scenarios").join(format!("{stem}.persona.json"));
    let scenario = PersonaScenario::from_file(&path).unwrap();
    let name = scenario.persona.expect("scenario files are labelled");
    make_persona_backend(name, scenario).unwrap()
}
