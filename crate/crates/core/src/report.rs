//! Verification report types shared by every suite.
//!
//! Checks never panic on mathematical failure: a failed identity becomes a
//! failed [`Check`] inside a [`Suite`], and the [`Report`] aggregates
//! suites with their runtimes. Exit codes and process-level behavior are
//! the CLI's business.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A single named assertion with its outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            detail: String::new(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            detail: detail.into(),
        }
    }

    pub fn from_bool(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        if passed {
            Check::pass(name)
        } else {
            Check::fail(name, detail)
        }
    }
}

/// A named group of checks with a wall-clock runtime.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
    pub runtime_ms: u128,
}

impl Suite {
    pub fn new(name: impl Into<String>) -> Self {
        Suite {
            name: name.into(),
            checks: Vec::new(),
            runtime_ms: 0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {} ({} checks, {} ms)",
            self.name,
            self.status(),
            self.checks.len(),
            self.runtime_ms
        )?;
        for c in self.failures() {
            writeln!(f, "  FAIL {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Aggregated result of several suites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suites: Vec<Suite>,
}

impl Report {
    pub fn new() -> Self {
        Report { suites: Vec::new() }
    }

    pub fn push(&mut self, suite: Suite) {
        self.suites.push(suite);
    }

    pub fn passed(&self) -> bool {
        self.suites.iter().all(Suite::passed)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            write!(f, "{s}")?;
        }
        writeln!(f, "overall: {}", self.status())
    }
}

/// Runs `body`, recording its wall-clock time into the suite it returns.
pub fn timed_suite(name: &str, body: impl FnOnce(&mut Suite)) -> Suite {
    let start = std::time::Instant::now();
    let mut suite = Suite::new(name);
    body(&mut suite);
    suite.runtime_ms = start.elapsed().as_millis();
    suite
}
