//! Randomized property checks shared by the property tests and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use relooper_core::agent::{Agent, OutputKind, TrialOutcome};
use relooper_core::llm::{Script, ScriptedBackend};
use relooper_core::textworld::candidate_actions;
use relooper_core::{format_action, parse_action, Action, Limits, ObjectId, ReceptacleId, World};

use super::{bundle, world, STEMS};

pub const CASES: u32 = 10_000;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn finish(result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    result.map_err(|e| e.to_string())
}

fn class() -> impl Strategy<Value = String> {
    "[a-z]{1,12}"
}

fn object() -> impl Strategy<Value = ObjectId> {
    (class(), 1u32..200).prop_map(|(c, i)| ObjectId::new(&c, i))
}

fn recep() -> impl Strategy<Value = ReceptacleId> {
    (class(), 1u32..200).prop_map(|(c, i)| ReceptacleId::new(&c, i))
}

pub fn any_action() -> impl Strategy<Value = Action> {
    prop_oneof![
        recep().prop_map(Action::GoTo),
        recep().prop_map(Action::Open),
        recep().prop_map(Action::Close),
        (object(), recep()).prop_map(|(object, from)| Action::Take { object, from }),
        (object(), recep()).prop_map(|(object, into)| Action::Put { object, into }),
        (object(), recep()).prop_map(|(object, with)| Action::Clean { object, with }),
        (object(), recep()).prop_map(|(object, with)| Action::Heat { object, with }),
        (object(), recep()).prop_map(|(object, with)| Action::Cool { object, with }),
        recep().prop_map(Action::Use),
    ]
}

/// A choice of scenario and a list of (pick-valid?, index) draws.
fn walk() -> impl Strategy<Value = (usize, Vec<(bool, usize)>)> {
    (0..STEMS.len(), prop::collection::vec((prop::bool::weighted(0.85), any::<usize>()), 0..40))
}

/// Every id mentioned by the world: its receptacles and objects.
fn alphabet(w: &World) -> (Vec<ReceptacleId>, Vec<ObjectId>) {
    (w.receptacles().map(|r| r.spec.id.clone()).collect(), w.objects().map(|(o, _)| o.clone()).collect())
}

/// Mostly candidate actions, sometimes arbitrary ones over the world's ids.
fn draw(w: &World, valid: bool, n: usize) -> Action {
    let cands = candidate_actions(w);
    if valid && !cands.is_empty() {
        return cands[n % cands.len()].clone();
    }
    let (rs, os) = alphabet(w);
    let r = rs[n % rs.len()].clone();
    let o = os.get((n / 7) % os.len().max(1)).cloned().unwrap_or_else(|| ObjectId::new("ghost", 1));
    match n % 9 {
        0 => Action::GoTo(r),
        1 => Action::Open(r),
        2 => Action::Close(r),
        3 => Action::Take { object: o, from: r },
        4 => Action::Put { object: o, into: r },
        5 => Action::Clean { object: o, with: r },
        6 => Action::Heat { object: o, with: r },
        7 => Action::Cool { object: o, with: r },
        _ => Action::Use(r),
    }
}

fn check_partition(w: &World) -> Result<(), TestCaseError> {
    for (o, _) in w.objects() {
        let holders = w.receptacles().filter(|r| r.contents.contains(o)).count();
        let held = usize::from(w.inventory() == Some(o));
        prop_assert_eq!(holders + held, 1, "{} is in {} places", o, holders + held);
    }
    Ok(())
}

/// Drives a random walk; `check` sees (before, action, observation text, after).
fn run_walks(
    cases: u32,
    check: impl Fn(&World, &Action, &str, &World) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let worlds: Vec<World> = STEMS.iter().map(|s| world(s)).collect();
    finish(runner(cases).run(&walk(), |(which, draws)| {
        let mut w = worlds[which].clone();
        for (valid, n) in draws {
            if w.is_done() {
                break;
            }
            let before = w.clone();
            let action = draw(&w, valid, n);
            let obs = w.step(&action).map_err(|e| TestCaseError::fail(e.to_string()))?;
            check(&before, &action, &obs.text, &w)?;
        }
        Ok(())
    }))
}

pub fn action_round_trip(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&any_action(), |a| {
        let text = format_action(&a);
        let back = parse_action(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(format_action(&back), text);
        Ok(())
    }))
}

pub fn placement_partition(cases: u32) -> Result<(), String> {
    run_walks(cases, |_, _, _, after| check_partition(after))
}

pub fn nothing_happens_is_pure(cases: u32) -> Result<(), String> {
    run_walks(cases, |before, action, text, after| {
        if text == "Nothing happens." {
            prop_assert!(before == after, "`{}` changed the world but reported nothing", action);
        }
        Ok(())
    })
}

pub fn hot_cool_exclusive(cases: u32) -> Result<(), String> {
    run_walks(cases, |_, action, _, after| {
        for (o, s) in after.objects() {
            prop_assert!(!(s.is_hot && s.is_cool), "{} is hot and cool after `{}`", o, action);
        }
        Ok(())
    })
}

/// A mix of thoughts, blanks, junk and real actions for one trial.
fn emissions() -> impl Strategy<Value = (usize, Vec<(u8, usize)>)> {
    (0..STEMS.len(), prop::collection::vec((0u8..4, any::<usize>()), 1..30))
}

fn render_emissions(w: &World, picks: &[(u8, usize)]) -> Vec<String> {
    let mut sim = w.clone();
    picks
        .iter()
        .map(|&(kind, n)| match kind {
            0 => format!("think: step {n}"),
            1 => String::new(),
            2 => format!("dance with {}", n % 5),
            _ => {
                let a = draw(&sim, true, n);
                if !sim.is_done() {
                    let _ = sim.step(&a);
                }
                format_action(&a)
            }
        })
        .collect()
}

/// Thought and blank steps never touch the world: replaying only the
/// action steps on a fresh world gives the same observations and end state.
pub fn thought_purity(cases: u32) -> Result<(), String> {
    let worlds: Vec<World> = STEMS.iter().map(|s| world(s)).collect();
    let bundles: Vec<_> = worlds.iter().map(bundle).collect();
    finish(runner(cases).run(&emissions(), |(which, picks)| {
        let lines = render_emissions(&worlds[which], &picks);
        let backend = ScriptedBackend::new(Script::sequence(lines, ""));
        let agent = Agent::new(&backend, Limits { max_steps: 30, max_trials: 1 });
        let mut live = worlds[which].clone();
        let run = agent
            .run_trial("p", 1, &mut live, &bundles[which])
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut replay = worlds[which].clone();
        for step in &run.record.steps {
            match step.kind {
                OutputKind::Thought => prop_assert_eq!(step.observation.as_str(), "OK."),
                OutputKind::Blank => prop_assert_eq!(step.observation.as_str(), "Nothing happens."),
                OutputKind::Action => {
                    let expected = match parse_action(&step.line) {
                        Ok(a) => replay.step(&a).map_err(|e| TestCaseError::fail(e.to_string()))?.text,
                        Err(_) => "Nothing happens.".to_string(),
                    };
                    prop_assert_eq!(&step.observation, &expected);
                }
            }
        }
        prop_assert!(live == replay, "agent world diverged from action-only replay");
        Ok(())
    }))
}

/// Capped trials have exactly `max_steps` steps, tasks at most `max_trials`
/// trials, and a success ends on a rewarded step.
pub fn budget_exactness(cases: u32) -> Result<(), String> {
    let worlds: Vec<World> = STEMS.iter().map(|s| world(s)).collect();
    let bundles: Vec<_> = worlds.iter().map(bundle).collect();
    let strategy = (emissions(), 1u32..12, 1u32..4);
    finish(runner(cases).run(&strategy, |((which, picks), max_steps, max_trials)| {
        let lines = render_emissions(&worlds[which], &picks);
        let backend = ScriptedBackend::new(Script::sequence(lines, "look around"));
        let limits = Limits { max_steps, max_trials };
        let w = &worlds[which];
        let rec = Agent::new(&backend, limits)
            .run_task("p", || w.clone(), &bundles[which])
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(!rec.trials.is_empty() && rec.trials.len() as u32 <= max_trials);
        for t in &rec.trials {
            match t.outcome {
                TrialOutcome::StepCapReached => prop_assert_eq!(t.step_count(), max_steps),
                TrialOutcome::Success => {
                    prop_assert!(t.step_count() <= max_steps);
                    prop_assert_eq!(t.steps.last().map(|s| s.reward), Some(1));
                }
            }
        }
        let sum: u32 = rec.trials.iter().map(|t| t.step_count()).sum();
        if rec.success {
            prop_assert_eq!(rec.total_steps, relooper_core::TotalSteps::Steps(sum));
        } else {
            prop_assert_eq!(rec.trials.len() as u32, max_trials);
        }
        Ok(())
    }))
}
