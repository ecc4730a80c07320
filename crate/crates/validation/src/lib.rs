//! Pass/fail bookkeeping for the acceptance suite.

use std::fmt;
use std::time::{Duration, Instant};

/// Measured outcome of one check, before the runtime budget is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check {
            pass,
            detail: detail.into(),
        }
    }
}

/// One numbered criterion with its timing.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub check: Check,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Outcome {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.check.pass && self.within_budget()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let budget = match self.budget {
            Some(b) => format!(
                "{:.2} s (limit {} s)",
                self.elapsed.as_secs_f64(),
                b.as_secs()
            ),
            None => format!("{:.2} s", self.elapsed.as_secs_f64()),
        };
        write!(
            f,
            "criterion {} {verdict} {} | {} | {budget}",
            self.id, self.title, self.check.detail
        )
    }
}

/// Times `check` and prints its verdict line.
pub fn run(
    id: u32,
    title: &'static str,
    budget: Option<u64>,
    check: impl FnOnce() -> Check,
) -> Outcome {
    let start = Instant::now();
    let check = check();
    let outcome = Outcome {
        id,
        title,
        check,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs),
    };
    println!("{outcome}");
    outcome
}
