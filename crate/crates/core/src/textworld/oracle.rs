//! Breadth-first reference solver.

use std::collections::{HashSet, VecDeque};

use super::action::Action;
use super::world::{goal_satisfied, Capability, World};

/// Actions whose preconditions could hold in `world`'s current state.
/// Every other grammatical action would return `Nothing happens.`.
pub fn candidate_actions(world: &World) -> Vec<Action> {
    let mut out = Vec::new();
    let here = world.agent_location().cloned();
    for r in world.receptacles() {
        if Some(&r.spec.id) != here.as_ref() {
            out.push(Action::GoTo(r.spec.id.clone()));
        }
    }
    let Some(here) = here else {
        return out;
    };
    let r = world.receptacle(&here).expect("agent location is declared");
    if r.spec.openable {
        out.push(if r.is_open { Action::Close(here.clone()) } else { Action::Open(here.clone()) });
    }
    if r.spec.capability == Capability::Lamp {
        out.push(Action::Use(here.clone()));
    }
    match world.inventory() {
        None if r.is_open => {
            for o in r.contents {
                out.push(Action::Take { object: o.clone(), from: here.clone() });
            }
        }
        None => {}
        Some(held) => {
            let object = held.clone();
            if r.is_open {
                out.push(Action::Put { object: object.clone(), into: here.clone() });
            }
            match r.spec.capability {
                Capability::Cleaner => out.push(Action::Clean { object, with: here }),
                Capability::Heater => out.push(Action::Heat { object, with: here }),
                Capability::Cooler => out.push(Action::Cool { object, with: here }),
                _ => {}
            }
        }
    }
    out
}

/// Shortest action sequence reaching the goal, or `None` if no plan of at
/// most `max_depth` actions exists. Works on a private copy of `world`.
pub fn solve_oracle(world: &World, max_depth: usize) -> Option<Vec<Action>> {
    if goal_satisfied(world) {
        return Some(Vec::new());
    }
    // Node table: (state, parent index, action that produced it, depth).
    let mut nodes: Vec<(World, usize, Option<Action>, usize)> = vec![(world.clone(), 0, None, 0)];
    let mut seen = HashSet::new();
    seen.insert(world.state().clone());
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        let depth = nodes[idx].3;
        if depth >= max_depth {
            continue;
        }
        for action in candidate_actions(&nodes[idx].0) {
            let mut next = nodes[idx].0.clone();
            let Ok(obs) = next.step(&action) else { continue };
            if !seen.insert(next.state().clone()) {
                continue;
            }
            let reached = obs.reward == 1;
            nodes.push((next, idx, Some(action), depth + 1));
            let child = nodes.len() - 1;
            if reached {
                return Some(extract_plan(&nodes, child));
            }
            queue.push_back(child);
        }
    }
    None
}

fn extract_plan(nodes: &[(World, usize, Option<Action>, usize)], mut idx: usize) -> Vec<Action> {
    let mut plan = Vec::new();
    while let Some(action) = &nodes[idx].2 {
        plan.push(action.clone());
        idx = nodes[idx].1;
    }
    plan.reverse();
    plan
}
