//! Probe bounds and check reports shared by every law suite.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default enumeration budget (candidates) for exhaustive searches.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

/// Finite bounds for a law-checking run. A fixed seed makes a run reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSpec {
    /// Largest object length probed.
    pub max_n: usize,
    /// Largest domain/codomain size of finite functions probed.
    pub max_fun: usize,
    /// Term depth bound for syntactic probes.
    pub depth: usize,
    /// Random samples drawn per instance when a hom-set is not enumerated.
    pub samples: usize,
    pub seed: u64,
    /// Largest hom-set enumerated in full.
    pub exhaustive_cap: u64,
    /// Overall enumeration budget for model searches.
    pub budget: u64,
    /// Candidate pairs spent, across a whole run, on exhaustive pullback
    /// uniqueness checks before falling back to sampled recovery checks.
    pub pullback_work: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            max_n: 3,
            max_fun: 3,
            depth: 2,
            samples: 50,
            seed: 0,
            exhaustive_cap: 4096,
            budget: DEFAULT_ENUM_BUDGET,
            pullback_work: 4_000_000,
        }
    }
}

impl ProbeSpec {
    pub fn with_max_n(mut self, n: usize) -> Self {
        self.max_n = n;
        self
    }

    pub fn with_max_fun(mut self, n: usize) -> Self {
        self.max_fun = n;
        self
    }

    pub fn with_depth(mut self, d: usize) -> Self {
        self.depth = d;
        self
    }

    pub fn with_samples(mut self, s: usize) -> Self {
        self.samples = s;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_exhaustive_cap(mut self, cap: u64) -> Self {
        self.exhaustive_cap = cap;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// A fresh generator for one named sub-check, so adding a check elsewhere
    /// does not perturb the draws of this one.
    pub fn rng(&self, stream: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in stream.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckEntry {
    pub check: String,
    pub instance: String,
    pub status: Status,
    /// Present on failures: enough data to replay the counterexample.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, check: impl Into<String>, instance: impl Into<String>) {
        self.entries.push(CheckEntry {
            check: check.into(),
            instance: instance.into(),
            status: Status::Pass,
            witness: None,
        });
    }

    pub fn fail(
        &mut self,
        check: impl Into<String>,
        instance: impl Into<String>,
        witness: impl Into<String>,
    ) {
        self.entries.push(CheckEntry {
            check: check.into(),
            instance: instance.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        });
    }

    pub fn add(&mut self, tally: Tally) {
        let instance = format!("{} ({} cases)", tally.instance, tally.cases);
        match tally.failure {
            None => self.pass(tally.check, instance),
            Some(w) => self.fail(tally.check, instance, w),
        }
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
    }

    /// Prefixes every check id, for embedding one suite inside another.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for e in &mut self.entries {
            e.check = format!("{prefix}{}", e.check);
        }
        self
    }

    pub fn sorted(mut self) -> Self {
        self.entries.sort();
        self
    }

    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn has_failure(&self, check_prefix: &str) -> bool {
        self.failures().any(|e| e.check.starts_with(check_prefix))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{} {} {}", e.status.to_string().to_uppercase(), e.check, e.instance)?;
            if let Some(w) = &e.witness {
                write!(f, "\n    witness: {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Counts the cases of one (check, instance) group and keeps the first
/// counterexample.
#[derive(Debug)]
pub struct Tally {
    check: String,
    instance: String,
    cases: usize,
    failure: Option<String>,
}

impl Tally {
    pub fn new(check: impl Into<String>, instance: impl Into<String>) -> Self {
        Tally {
            check: check.into(),
            instance: instance.into(),
            cases: 0,
            failure: None,
        }
    }

    /// Records one case. Budget errors abort the run; any other error counts
    /// as a failure of the case.
    pub fn case(&mut self, outcome: Result<bool>, witness: impl FnOnce() -> String) -> Result<()> {
        self.cases += 1;
        let detail = match outcome {
            Ok(true) => return Ok(()),
            Ok(false) => None,
            Err(e) if e.is_budget() => return Err(e),
            Err(e) => Some(e.to_string()),
        };
        if self.failure.is_none() {
            let mut w = witness();
            if let Some(d) = detail {
                w = format!("{w}: {d}");
            }
            self.failure = Some(w);
        }
        Ok(())
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn cases(&self) -> usize {
        self.cases
    }
}

pub(crate) fn budget_error(what: impl Into<String>, required: u128, budget: u64) -> Error {
    Error::BudgetExceeded {
        what: what.into(),
        required: required.to_string(),
        budget,
    }
}
