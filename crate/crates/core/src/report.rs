//! Structured verification records.

use serde::Serialize;

/// One named check: measured values, the bound they are held to, and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, values: Vec<f64>, bound: Option<f64>, pass: bool) -> Self {
        Self { name: name.into(), values, bound, pass, note: None }
    }

    /// Passes when every value is at most `bound`.
    pub fn at_most(name: impl Into<String>, values: Vec<f64>, bound: f64) -> Self {
        let pass = values.iter().all(|&v| v <= bound);
        Self::new(name, values, Some(bound), pass)
    }

    /// Informational record; always passes.
    pub fn info(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self::new(name, values, None, true)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A titled group of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), checks: Vec::new(), pass: true }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.title, c.name);
            self.push(c);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `true` when `v[i+1] <= v[i] + slack` for all `i`.
pub fn nonincreasing(v: &[f64], slack: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + slack)
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}
