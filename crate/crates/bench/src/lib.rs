//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use relooper_core::llm::{make_persona_backend, PersonaBackend, PersonaScenario};
use relooper_core::textworld::load_world_file;
use relooper_core::World;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

pub fn world(stem: &str) -> World {
    load_world_file(&data_dir().join("scenarios").join(format!("{stem}.json"))).expect("bundled world")
}

pub fn persona(stem: &str) -> PersonaBackend {
    let path = data_dir().join("scenarios").join(format!("{stem}.persona.json"));
    let scenario = PersonaScenario::from_file(&path).expect("bundled persona");
    let name = scenario.persona.expect("labelled persona");
    make_persona_backend(name, scenario).expect("consistent persona")
}
