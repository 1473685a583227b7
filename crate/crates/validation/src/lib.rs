//! Pass/fail bookkeeping for the acceptance run.

use std::fmt;
use std::time::{Duration, Instant};

/// Outcome of one acceptance check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects outcomes and prints each as soon as it is known.
#[derive(Debug, Default)]
pub struct Report {
    outcomes: Vec<Outcome>,
}

impl Report {
    /// Runs `check`, which returns `(passed, detail)`. A panic counts as a
    /// failure with the panic message as detail.
    pub fn run(&mut self, id: &str, title: &str, check: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (passed, detail) = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let outcome = Outcome {
            id: id.to_string(),
            title: title.to_string(),
            passed,
            detail,
            elapsed: start.elapsed(),
        };
        println!("{outcome}");
        self.outcomes.push(outcome);
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn failed(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "acceptance: {} passed, {} failed",
            self.outcomes.len() - self.failed(),
            self.failed()
        )
    }
}
