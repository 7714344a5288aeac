use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::{Command, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|observed - expected| <= tolerance`
    Eq,
    /// `observed <= expected + tolerance`
    Le,
    /// `observed >= expected - tolerance`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, relation: Relation, expected: f64, observed: f64, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::Eq => (observed - expected).abs() <= tolerance,
            Relation::Le => observed <= expected + tolerance,
            Relation::Ge => observed >= expected - tolerance,
        };
        Self { name: name.into(), expected, observed, tolerance, relation, pass }
    }
}

/// A measured quantity that is reported but not asserted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub config: ScenarioConfig,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    /// File name to contents; only the names go into `report.json`.
    #[serde(serialize_with = "artifact_names")]
    pub artifacts: BTreeMap<String, String>,
    pub passed: bool,
}

fn artifact_names<S: Serializer>(artifacts: &BTreeMap<String, String>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(artifacts.keys())
}

impl Report {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Collects checks and observations in insertion order.
#[derive(Debug, Default)]
pub struct Recorder {
    checks: Vec<Check>,
    observations: Vec<Observation>,
    artifacts: BTreeMap<String, String>,
}

impl Recorder {
    pub fn check(&mut self, check: Check) {
        debug_assert!(self.checks.iter().all(|c| c.name != check.name), "duplicate check {}", check.name);
        self.checks.push(check);
    }

    pub fn le(&mut self, name: &str, observed: f64, bound: f64, tolerance: f64) {
        self.check(Check::new(name, Relation::Le, bound, observed, tolerance));
    }

    pub fn ge(&mut self, name: &str, observed: f64, bound: f64, tolerance: f64) {
        self.check(Check::new(name, Relation::Ge, bound, observed, tolerance));
    }

    pub fn eq(&mut self, name: &str, observed: f64, expected: f64, tolerance: f64) {
        self.check(Check::new(name, Relation::Eq, expected, observed, tolerance));
    }

    /// Passes when `count` is zero.
    pub fn none(&mut self, name: &str, count: usize) {
        self.eq(name, count as f64, 0.0, 0.0);
    }

    pub fn observe(&mut self, name: &str, value: f64, note: &str) {
        self.observations.push(Observation { name: name.into(), value, note: note.into() });
    }

    pub fn artifact(&mut self, file: &str, contents: String) {
        self.artifacts.insert(file.into(), contents);
    }

    pub fn finish(self, command: Command, config: ScenarioConfig) -> Report {
        let passed = self.checks.iter().all(|c| c.pass);
        Report {
            command,
            config,
            checks: self.checks,
            observations: self.observations,
            artifacts: self.artifacts,
            passed,
        }
    }
}

/// Running maximum that propagates NaN, so a non-finite value fails the check it feeds.
#[derive(Clone, Copy, Debug)]
pub struct Worst(f64);

impl Default for Worst {
    fn default() -> Self {
        Self(f64::NEG_INFINITY)
    }
}

impl Worst {
    pub fn push(&mut self, v: f64) {
        if v.is_nan() || self.0.is_nan() {
            self.0 = f64::NAN;
        } else {
            self.0 = self.0.max(v);
        }
    }

    /// Maximum seen, or 0 when nothing was pushed.
    pub fn get(self) -> f64 {
        if self.0 == f64::NEG_INFINITY {
            0.0
        } else {
            self.0
        }
    }
}
