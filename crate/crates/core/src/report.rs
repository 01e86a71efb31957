//! Pass/fail bookkeeping shared by the `verify_*` functions.

use num_rational::Ratio;
use serde::{Serialize, Serializer};

/// How many violation messages a check keeps verbatim.
const MAX_LISTED: usize = 16;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub violation_count: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

/// Accumulates cases for one named check.
#[derive(Debug)]
pub struct Check {
    name: String,
    cases: u64,
    violation_count: u64,
    violations: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    /// Records one case; `describe` runs only on failure.
    pub fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(describe());
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(msg);
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Folds a finished outcome into this check, tagging its violations.
    pub fn absorb(&mut self, other: &CheckOutcome, context: &str) {
        self.cases += other.cases;
        self.violation_count += other.violation_count;
        for v in &other.violations {
            if self.violations.len() < MAX_LISTED {
                self.violations.push(format!("{context}: {v}"));
            }
        }
    }

    pub fn finish(self) -> CheckOutcome {
        CheckOutcome {
            passed: self.violation_count == 0,
            name: self.name,
            cases: self.cases,
            violation_count: self.violation_count,
            violations: self.violations,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub d: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, d: u64, checks: Vec<CheckOutcome>) -> Self {
        Self {
            suite: suite.into(),
            d,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Serializes an exact probability as `"n/d"` (or `"n"` when integral).
pub fn ratio_str<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ratio_vec_str<S: Serializer>(v: &[Ratio<i64>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}
