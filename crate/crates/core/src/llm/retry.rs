use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::LlmError;

/// Exponential backoff with a bounded number of attempts and an optional
/// overall deadline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    #[serde(with = "humantime_serde")]
    pub base_delay: Duration,
    #[serde(with = "humantime_serde")]
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 4,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    /// Delay after the `attempt`-th failure (1-based): base, 2·base, 4·base, ...
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt.saturating_sub(1));
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }

    /// Runs `op` until it succeeds, fails with a non-retriable error, runs
    /// out of attempts, or would overrun `deadline`.
    pub fn run<T>(
        &self,
        deadline: Option<Duration>,
        mut op: impl FnMut() -> Result<T, LlmError>,
    ) -> Result<T, LlmError> {
        let started = Instant::now();
        let attempts = self.max_attempts.max(1);
        let mut attempt = 0;
        loop {
            attempt += 1;
            let err = match op() {
                Ok(v) => return Ok(v),
                Err(e) if !e.is_retriable() => return Err(e),
                Err(e) => e,
            };
            if attempt >= attempts {
                return Err(LlmError::RetriesExhausted { attempts: attempt, last: Box::new(err) });
            }
            let delay = self.delay(attempt);
            if let Some(limit) = deadline {
                if started.elapsed() + delay >= limit {
                    return Err(LlmError::DeadlineExceeded { deadline_ms: limit.as_millis() as u64 });
                }
            }
            log::warn!("attempt {attempt} failed ({err}); retrying in {delay:?}");
            std::thread::sleep(delay);
        }
    }
}
