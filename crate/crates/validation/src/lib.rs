//! Reporting for acceptance runs: one line per criterion and an exit status.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

/// Result of one criterion: whether it held and what was measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub check: Box<dyn FnOnce() -> Outcome>,
}

struct Line<'a> {
    id: u32,
    title: &'a str,
    outcome: &'a Outcome,
}

impl fmt::Display for Line<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.outcome.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} {status}: {}. {}",
            self.id, self.title, self.outcome.detail
        )
    }
}

/// Runs every criterion, printing its line as soon as it finishes. A panic
/// inside a check counts as a failure with the panic message.
pub fn run(criteria: Vec<Criterion>) -> ExitCode {
    let mut failed = Vec::new();
    for c in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Outcome::new(false, format!("check panicked: {msg}"))
        });
        println!(
            "{}",
            Line {
                id: c.id,
                title: c.title,
                outcome: &outcome
            }
        );
        if !outcome.passed {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
