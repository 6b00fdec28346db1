use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use relooper_bench::{persona, world};
use relooper_core::llm::make_oracle_backend;
use relooper_core::textworld::DEFAULT_ORACLE_DEPTH;
use relooper_core::{assemble, solve_oracle, Agent, ExemplarStore, Limits, PromptBundle};

fn step(c: &mut Criterion) {
    let w = world("task12_tomato");
    let plan = solve_oracle(&w, DEFAULT_ORACLE_DEPTH).unwrap();
    c.bench_function("step/replay_plan", |b| {
        b.iter_batched(
            || w.clone(),
            |mut w| {
                for a in &plan {
                    black_box(w.step(a).unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_oracle");
    for stem in ["task01_pick", "task06_pillows", "task12_tomato"] {
        let w = world(stem);
        g.bench_function(stem, |b| b.iter(|| solve_oracle(black_box(&w), DEFAULT_ORACLE_DEPTH)));
    }
    g.finish();
}

fn prompt(c: &mut Criterion) {
    let w = world("task06_pillows");
    let mut bundle = PromptBundle::for_world(&ExemplarStore::builtin(), &w, true);
    c.bench_function("assemble/no_adaptations", |b| b.iter(|| assemble(black_box(&bundle))));
    for i in 0..9 {
        bundle.adaptations.push(format!("New plan: attempt {i} went wrong, so I will search every receptacle."));
    }
    c.bench_function("assemble/nine_adaptations", |b| b.iter(|| assemble(black_box(&bundle))));
}

fn run_task(c: &mut Criterion) {
    let w = world("task12_tomato");
    let bundle = PromptBundle::for_world(&ExemplarStore::builtin(), &w, true);
    let oracle = make_oracle_backend(&w, 1, DEFAULT_ORACLE_DEPTH).unwrap();
    let adapt = persona("task12_tomato");
    c.bench_function("run_task/oracle", |b| {
        let agent = Agent::new(&oracle, Limits::default());
        b.iter(|| agent.run_task("task12_tomato", || w.clone(), &bundle).unwrap())
    });
    c.bench_function("run_task/fail_then_adapt", |b| {
        let agent = Agent::new(&adapt, Limits::default());
        b.iter(|| agent.run_task("task12_tomato", || w.clone(), &bundle).unwrap())
    });
}

criterion_group!(benches, step, oracle, prompt, run_task);
criterion_main!(benches);
