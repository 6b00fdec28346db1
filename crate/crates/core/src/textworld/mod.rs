//! Deterministic household text game.
//!
//! A [`World`] is a set of receptacles holding objects plus a single task.
//! The agent moves between receptacles and manipulates at most one held
//! object at a time through nine commands (see [`Action`]). Any command
//! whose preconditions fail answers `Nothing happens.` and changes nothing.

mod action;
pub mod catalog;
mod ids;
mod load;
mod oracle;
mod task;
mod world;

pub use action::{format_action, normalize_whitespace, parse_action, Action, ParseError};
pub use catalog::{Catalog, CatalogError, Event};
pub use ids::{IdError, ObjectId, ReceptacleId};
pub use load::{load_world, load_world_file, load_world_with, LoadError};
pub use oracle::{candidate_actions, solve_oracle};
pub use task::{format_goal_instruction, Phrasing, ReceptacleTarget, TaskSpec, TaskType};
pub use world::{
    goal_satisfied, BuildError, Capability, ObjectState, Observation, Receptacle, ReceptacleSpec,
    StepError, World, WorldBuilder, WorldState,
};

/// Default search depth for the reference solver.
pub const DEFAULT_ORACLE_DEPTH: usize = 40;
