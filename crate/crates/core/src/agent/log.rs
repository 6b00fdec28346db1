//! Line-delimited JSON trajectory logs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{OutputKind, TotalSteps, TrialOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LogEvent {
    Step {
        task_id: String,
        ep: u32,
        k: u32,
        kind: OutputKind,
        line: String,
        observation: String,
        reward: u8,
        prompt_chars: usize,
    },
    Trial {
        task_id: String,
        ep: u32,
        outcome: TrialOutcome,
        steps: u32,
        prompt_chars: usize,
        adaptation: Option<String>,
    },
    Task {
        task_id: String,
        success: bool,
        total_steps: TotalSteps,
        trials: u32,
        error: Option<String>,
    },
}

/// Receives log events; must tolerate concurrent callers.
pub trait TrajectorySink: Send + Sync {
    fn record(&self, event: &LogEvent);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TrajectorySink for NullSink {
    fn record(&self, _event: &LogEvent) {}
}

/// Keeps events in memory; handy in tests.
#[derive(Debug, Default)]
pub struct MemorySink {
    events: Mutex<Vec<LogEvent>>,
}

impl MemorySink {
    pub fn events(&self) -> Vec<LogEvent> {
        self.events.lock().expect("sink lock").clone()
    }
}

impl TrajectorySink for MemorySink {
    fn record(&self, event: &LogEvent) {
        self.events.lock().expect("sink lock").push(event.clone());
    }
}

/// Appends one JSON object per line to a file.
#[derive(Debug)]
pub struct JsonlSink {
    out: Mutex<BufWriter<File>>,
}

impl JsonlSink {
    pub fn create(path: &Path) -> std::io::Result<Self> {
        Ok(Self { out: Mutex::new(BufWriter::new(File::create(path)?)) })
    }

    pub fn flush(&self) -> std::io::Result<()> {
        self.out.lock().expect("sink lock").flush()
    }
}

impl TrajectorySink for JsonlSink {
    fn record(&self, event: &LogEvent) {
        let line = serde_json::to_string(event).expect("log events serialize");
        let mut out = self.out.lock().expect("sink lock");
        if let Err(e) = writeln!(out, "{line}") {
            log::error!("failed to write trajectory log: {e}");
        }
    }
}

impl Drop for JsonlSink {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_record_shape() {
        let e = LogEvent::Step {
            task_id: "12".into(),
            ep: 1,
            k: 0,
            kind: OutputKind::Thought,
            line: "think: x".into(),
            observation: "OK.".into(),
            reward: 0,
            prompt_chars: 10,
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"record":"step","task_id":"12","ep":1,"k":0,"kind":"thought","line":"think: x","observation":"OK.","reward":0,"prompt_chars":10}"#
        );
    }

    #[test]
    fn jsonl_writes_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        {
            let sink = JsonlSink::create(&path).unwrap();
            for ep in 1..=3 {
                sink.record(&LogEvent::Trial {
                    task_id: "6".into(),
                    ep,
                    outcome: TrialOutcome::StepCapReached,
                    steps: 49,
                    prompt_chars: 100,
                    adaptation: None,
                });
            }
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back: LogEvent = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert!(matches!(back, LogEvent::Trial { ep: 1, .. }));
    }
}
