use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use relooper_core::harness::{read_report, run_suite, BackendSpec, SuiteConfig, REPORT_FILE, TRAJECTORY_FILE};
use relooper_core::textworld::{load_world_file, Catalog, Event, DEFAULT_ORACLE_DEPTH};
use relooper_core::{emit_report, goal_satisfied, parse_action, solve_oracle, ReportFormat};

#[derive(Parser, Debug)]
#[command(name = "relooper", version, about = "Act, reflect and retry in a household text game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a suite and write trajectory.jsonl and report.json.
    Run {
        /// Suite configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// oracle, remote, scripted:<script> or persona:<name>.
        #[arg(long)]
        backend: Option<String>,
        /// Wall-clock budget for starting tasks, e.g. 90s or 12h.
        #[arg(long, value_parser = humantime::parse_duration)]
        budget: Option<Duration>,
        /// Number of tasks to run at once.
        #[arg(long)]
        parallel: Option<usize>,
        /// Run directory (overrides output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Print the report of a finished run.
    Report {
        run_dir: PathBuf,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Print the shortest plan for a world file.
    Solve {
        world: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_DEPTH)]
        max_depth: usize,
    },
    /// Play a world file by hand.
    Play { world: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { config, backend, budget, parallel, out, format } => {
            let mut suite = SuiteConfig::load(&config)?;
            if let Some(spec) = backend {
                let spec: BackendSpec = spec.parse()?;
                let keep_file_settings =
                    matches!((&spec, &suite.backend), (BackendSpec::Remote(_), BackendSpec::Remote(_)));
                if !keep_file_settings {
                    suite.backend = spec;
                }
            }
            if let Some(b) = budget {
                suite.wall_clock_budget = b;
            }
            if let Some(p) = parallel {
                suite.parallel = p;
            }
            if let Some(dir) = out {
                suite.output_dir = dir;
            }
            suite.validate()?;
            let report = run_suite(&suite)?;
            print!("{}", emit_report(&report, format));
            eprintln!(
                "wrote {} and {}",
                suite.output_dir.join(TRAJECTORY_FILE).display(),
                suite.output_dir.join(REPORT_FILE).display()
            );
            if report.budget_exhausted {
                eprintln!("wall-clock budget exhausted after {} tasks", report.attempted);
            }
            if report.has_errors() {
                for t in report.per_task.iter().filter(|t| t.error.is_some()) {
                    eprintln!("task {} failed: {}", t.task_id, t.error.as_deref().unwrap_or_default());
                }
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { run_dir, format } => {
            let report = read_report(&run_dir)?;
            print!("{}", emit_report(&report, format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { world, max_depth } => {
            let w = load(&world)?;
            match solve_oracle(&w, max_depth) {
                Some(plan) => {
                    for a in plan {
                        println!("{a}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => bail!("no plan within {max_depth} actions"),
            }
        }
        Command::Play { world } => {
            let w = load(&world)?;
            play(w, std::io::stdin().lock(), std::io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(path: &Path) -> Result<relooper_core::World> {
    load_world_file(path).with_context(|| format!("loading {}", path.display()))
}

fn play(mut world: relooper_core::World, input: impl BufRead, mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", world.initial_observation())?;
    if goal_satisfied(&world) {
        writeln!(out, "The task is already complete.")?;
        return Ok(());
    }
    write!(out, "> ")?;
    out.flush()?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        match line {
            "" => {}
            "quit" | "exit" => break,
            "help" => writeln!(
                out,
                "go to R | open R | close R | take O from R | put O in/on R | clean O with R | heat O with R | cool O with R | use R | quit"
            )?,
            _ => match parse_action(line) {
                Ok(action) => {
                    let obs = world.step(&action)?;
                    writeln!(out, "{}", obs.text)?;
                    if obs.reward == 1 {
                        writeln!(out, "Task complete.")?;
                        return Ok(());
                    }
                }
                Err(_) => writeln!(out, "{}", Catalog::builtin().template(Event::Nothing))?,
            },
        }
        write!(out, "> ")?;
        out.flush()?;
    }
    Ok(())
}
