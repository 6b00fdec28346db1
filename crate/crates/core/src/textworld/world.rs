use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::action::Action;
use super::catalog::{article_list, Catalog, Event};
use super::ids::{ObjectId, ReceptacleId};
use super::task::{format_goal_instruction, TaskSpec, TaskType};

/// What a receptacle can do to a held object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    None,
    Cleaner,
    Heater,
    Cooler,
    Lamp,
}

impl Capability {
    /// Per-class default used when a world file leaves `capability` unset.
    pub fn default_for_class(class: &str) -> Self {
        match class {
            "sinkbasin" => Capability::Cleaner,
            "microwave" => Capability::Heater,
            "fridge" => Capability::Cooler,
            "desklamp" | "floorlamp" => Capability::Lamp,
            _ => Capability::None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectState {
    pub is_clean: bool,
    pub is_hot: bool,
    pub is_cool: bool,
}

/// Static description of one receptacle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceptacleSpec {
    pub id: ReceptacleId,
    pub openable: bool,
    pub capability: Capability,
}

/// Read-only view of a receptacle and its current contents.
#[derive(Debug, Clone, Copy)]
pub struct Receptacle<'w> {
    pub spec: &'w ReceptacleSpec,
    pub is_open: bool,
    pub contents: &'w BTreeSet<ObjectId>,
}

/// The parts of a world that never change during an episode.
#[derive(Debug, PartialEq, Eq)]
struct Layout {
    receptacles: Vec<ReceptacleSpec>,
    task: TaskSpec,
    catalog: Catalog,
}

/// Everything `step` can change. Hashable so the solver can deduplicate states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldState {
    /// Parallel to the layout's receptacle list.
    open: Vec<bool>,
    contents: Vec<BTreeSet<ObjectId>>,
    objects: BTreeMap<ObjectId, ObjectState>,
    /// Index into the receptacle list; `None` is the starting position.
    location: Option<usize>,
    inventory: Option<ObjectId>,
    /// Latched once a target object was held while switching on the task's lamp.
    examined: bool,
    done: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub text: String,
    /// 1 when this step satisfied the goal, 0 otherwise.
    pub reward: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("the episode is already finished")]
    EpisodeFinished,
}

/// Semantic problems found while building a world.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate receptacle `{0}`")]
    DuplicateReceptacle(ReceptacleId),
    #[error("duplicate object `{0}`")]
    DuplicateObject(ObjectId),
    #[error("object `{object}` placed in undeclared receptacle `{receptacle}`")]
    DanglingLocation { object: ObjectId, receptacle: ReceptacleId },
    #[error("object `{0}` is both hot and cool")]
    HotAndCool(ObjectId),
    #[error("invalid task: {0}")]
    Task(String),
    #[error("task references {what} `{name}` which the world does not declare")]
    AbsentClass { what: &'static str, name: String },
    #[error("world declares no receptacles")]
    NoReceptacles,
}

/// A household text game instance.
#[derive(Debug, Clone)]
pub struct World {
    layout: Arc<Layout>,
    state: WorldState,
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout)
            && self.state == other.state
    }
}

impl Eq for World {}

/// Programmatic constructor; world files go through [`super::load_world`].
#[derive(Debug, Clone)]
pub struct WorldBuilder {
    receptacles: Vec<ReceptacleSpec>,
    objects: Vec<(ObjectId, ReceptacleId, ObjectState)>,
    task: TaskSpec,
    catalog: Catalog,
}

impl WorldBuilder {
    pub fn new(task: TaskSpec) -> Self {
        Self { receptacles: Vec::new(), objects: Vec::new(), task, catalog: Catalog::builtin() }
    }

    /// Adds a receptacle with its class-default capability.
    pub fn receptacle(self, id: &str, openable: bool) -> Self {
        let id: ReceptacleId = id.parse().expect("valid receptacle id");
        let capability = Capability::default_for_class(id.class());
        self.receptacle_with(id, openable, capability)
    }

    pub fn receptacle_with(mut self, id: ReceptacleId, openable: bool, capability: Capability) -> Self {
        self.receptacles.push(ReceptacleSpec { id, openable, capability });
        self
    }

    pub fn object(self, id: &str, location: &str) -> Self {
        self.object_with(
            id.parse().expect("valid object id"),
            location.parse().expect("valid receptacle id"),
            ObjectState::default(),
        )
    }

    pub fn object_with(mut self, id: ObjectId, location: ReceptacleId, state: ObjectState) -> Self {
        self.objects.push((id, location, state));
        self
    }

    pub fn catalog(mut self, catalog: Catalog) -> Self {
        self.catalog = catalog;
        self
    }

    pub fn build(self) -> Result<World, BuildError> {
        if self.receptacles.is_empty() {
            return Err(BuildError::NoReceptacles);
        }
        let mut index = BTreeMap::new();
        for (i, r) in self.receptacles.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(BuildError::DuplicateReceptacle(r.id.clone()));
            }
        }
        self.task.validate().map_err(BuildError::Task)?;
        let has_class = |class: &str| self.receptacles.iter().any(|r| r.id.class() == class);
        if let Some(target) = &self.task.receptacle {
            let declared = match target {
                super::task::ReceptacleTarget::Id(id) => index.contains_key(id),
                super::task::ReceptacleTarget::Class(class) => has_class(class),
            };
            if !declared {
                return Err(BuildError::AbsentClass { what: "receptacle", name: target.to_string() });
            }
        }
        if let Some(lamp) = &self.task.lamp_class {
            if !has_class(lamp) {
                return Err(BuildError::AbsentClass { what: "lamp", name: lamp.clone() });
            }
        }

        let mut contents = vec![BTreeSet::new(); self.receptacles.len()];
        let mut objects = BTreeMap::new();
        for (id, location, state) in self.objects {
            if state.is_hot && state.is_cool {
                return Err(BuildError::HotAndCool(id));
            }
            let Some(&slot) = index.get(&location) else {
                return Err(BuildError::DanglingLocation { object: id, receptacle: location });
            };
            if objects.insert(id.clone(), state).is_some() {
                return Err(BuildError::DuplicateObject(id));
            }
            contents[slot].insert(id);
        }
        let open = self.receptacles.iter().map(|r| !r.openable).collect();
        Ok(World {
            layout: Arc::new(Layout {
                receptacles: self.receptacles,
                task: self.task,
                catalog: self.catalog,
            }),
            state: WorldState {
                open,
                contents,
                objects,
                location: None,
                inventory: None,
                examined: false,
                done: false,
            },
        })
    }
}

impl World {
    pub fn task(&self) -> &TaskSpec {
        &self.layout.task
    }

    pub fn catalog(&self) -> &Catalog {
        &self.layout.catalog
    }

    pub fn is_done(&self) -> bool {
        self.state.done
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn inventory(&self) -> Option<&ObjectId> {
        self.state.inventory.as_ref()
    }

    /// `None` until the agent first moves.
    pub fn agent_location(&self) -> Option<&ReceptacleId> {
        self.state.location.map(|i| &self.layout.receptacles[i].id)
    }

    pub fn receptacle_count(&self) -> usize {
        self.layout.receptacles.len()
    }

    pub fn receptacles(&self) -> impl Iterator<Item = Receptacle<'_>> + '_ {
        self.layout.receptacles.iter().enumerate().map(|(i, spec)| Receptacle {
            spec,
            is_open: self.state.open[i],
            contents: &self.state.contents[i],
        })
    }

    pub fn receptacle(&self, id: &ReceptacleId) -> Option<Receptacle<'_>> {
        self.slot(id).map(|i| Receptacle {
            spec: &self.layout.receptacles[i],
            is_open: self.state.open[i],
            contents: &self.state.contents[i],
        })
    }

    pub fn objects(&self) -> impl Iterator<Item = (&ObjectId, &ObjectState)> + '_ {
        self.state.objects.iter()
    }

    pub fn object_state(&self, id: &ObjectId) -> Option<&ObjectState> {
        self.state.objects.get(id)
    }

    /// Where an object currently is: `Some(receptacle)` or `None` when held.
    pub fn object_location(&self, id: &ObjectId) -> Option<&ReceptacleId> {
        self.state
            .contents
            .iter()
            .position(|c| c.contains(id))
            .map(|i| &self.layout.receptacles[i].id)
    }

    fn slot(&self, id: &ReceptacleId) -> Option<usize> {
        self.layout.receptacles.iter().position(|r| &r.id == id)
    }

    /// The receptacle listing followed by the goal sentence.
    pub fn initial_observation(&self) -> String {
        let names: Vec<String> =
            self.layout.receptacles.iter().map(|r| r.id.to_string()).collect();
        format!(
            "You are in the middle of a room. Looking quickly around you, you see {}.\nYour task is to: {}.",
            article_list(&names),
            format_goal_instruction(&self.layout.task)
        )
    }

    /// Applies one action. Failed preconditions yield `Nothing happens.` and
    /// leave the world untouched.
    pub fn step(&mut self, action: &Action) -> Result<Observation, StepError> {
        if self.state.done {
            return Err(StepError::EpisodeFinished);
        }
        let text = match self.apply(action) {
            Some(text) => text,
            None => {
                return Ok(Observation {
                    text: self.catalog().template(Event::Nothing).to_string(),
                    reward: 0,
                })
            }
        };
        let reward = if goal_satisfied(self) {
            self.state.done = true;
            1
        } else {
            0
        };
        Ok(Observation { text, reward })
    }

    /// Returns the observation text on success, `None` on a failed precondition.
    /// Preconditions are all checked before any mutation.
    fn apply(&mut self, action: &Action) -> Option<String> {
        let layout = Arc::clone(&self.layout);
        let catalog = &layout.catalog;
        let here = self.state.location;
        // Resolves a receptacle that must be the agent's current location.
        let at = |id: &ReceptacleId| -> Option<usize> {
            let slot = layout.receptacles.iter().position(|r| &r.id == id)?;
            (here == Some(slot)).then_some(slot)
        };

        match action {
            Action::GoTo(id) => {
                let slot = self.slot(id)?;
                self.state.location = Some(slot);
                let spec = &layout.receptacles[slot];
                let name = id.to_string();
                let contents = catalog.contents(&self.state.contents[slot]);
                Some(if !spec.openable {
                    catalog.render(Event::ArriveOn, &name, "", &contents)
                } else if self.state.open[slot] {
                    catalog.render(Event::ArriveOpen, &name, "", &contents)
                } else {
                    catalog.render(Event::ArriveClosed, &name, "", "")
                })
            }
            Action::Open(id) => {
                let slot = at(id)?;
                if !layout.receptacles[slot].openable || self.state.open[slot] {
                    return None;
                }
                self.state.open[slot] = true;
                let contents = catalog.contents(&self.state.contents[slot]);
                Some(catalog.render(Event::Open, &id.to_string(), "", &contents))
            }
            Action::Close(id) => {
                let slot = at(id)?;
                if !layout.receptacles[slot].openable || !self.state.open[slot] {
                    return None;
                }
                self.state.open[slot] = false;
                Some(catalog.render(Event::Close, &id.to_string(), "", ""))
            }
            Action::Take { object, from } => {
                let slot = at(from)?;
                if !self.state.open[slot]
                    || !self.state.contents[slot].contains(object)
                    || self.state.inventory.is_some()
                {
                    return None;
                }
                self.state.contents[slot].remove(object);
                self.state.inventory = Some(object.clone());
                Some(catalog.render(Event::Take, &from.to_string(), &object.to_string(), ""))
            }
            Action::Put { object, into } => {
                let slot = at(into)?;
                if self.state.inventory.as_ref() != Some(object) || !self.state.open[slot] {
                    return None;
                }
                self.state.inventory = None;
                self.state.contents[slot].insert(object.clone());
                Some(catalog.render(Event::Put, &into.to_string(), &object.to_string(), ""))
            }
            Action::Clean { object, with }
            | Action::Heat { object, with }
            | Action::Cool { object, with } => {
                let (needed, event) = match action {
                    Action::Clean { .. } => (Capability::Cleaner, Event::Clean),
                    Action::Heat { .. } => (Capability::Heater, Event::Heat),
                    _ => (Capability::Cooler, Event::Cool),
                };
                let slot = at(with)?;
                if self.state.inventory.as_ref() != Some(object) || layout.receptacles[slot].capability != needed {
                    return None;
                }
                let state = self.state.objects.get_mut(object)?;
                match event {
                    Event::Clean => state.is_clean = true,
                    Event::Heat => {
                        state.is_hot = true;
                        state.is_cool = false;
                    }
                    _ => {
                        state.is_cool = true;
                        state.is_hot = false;
                    }
                }
                Some(catalog.render(event, &with.to_string(), &object.to_string(), ""))
            }
            Action::Use(id) => {
                let slot = at(id)?;
                if layout.receptacles[slot].capability != Capability::Lamp {
                    return None;
                }
                let task = &layout.task;
                let holds_target = self
                    .state
                    .inventory
                    .as_ref()
                    .is_some_and(|o| o.class() == task.object_class);
                if task.task_type == TaskType::ExamineInLight
                    && holds_target
                    && task.lamp_class.as_deref() == Some(id.class())
                {
                    self.state.examined = true;
                }
                Some(catalog.render(Event::Use, &id.to_string(), "", ""))
            }
        }
    }
}

/// Whether the world's task is currently accomplished.
pub fn goal_satisfied(world: &World) -> bool {
    let task = world.task();
    let state = &world.state;
    if task.task_type == TaskType::ExamineInLight {
        return state.examined;
    }
    let Some(target) = &task.receptacle else {
        return false;
    };
    let qualifies = |o: &ObjectId| {
        o.class() == task.object_class && {
            let s = &state.objects[o];
            match task.task_type {
                TaskType::CleanAndPlace => s.is_clean,
                TaskType::HeatAndPlace => s.is_hot,
                TaskType::CoolAndPlace => s.is_cool,
                _ => true,
            }
        }
    };
    let needed = if task.task_type == TaskType::PickTwoAndPlace { 2 } else { 1 };
    world
        .layout
        .receptacles
        .iter()
        .zip(&state.contents)
        .filter(|(spec, _)| target.matches(&spec.id))
        .any(|(_, contents)| contents.iter().filter(|o| qualifies(o)).count() >= needed)
}
