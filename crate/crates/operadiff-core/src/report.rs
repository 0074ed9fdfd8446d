//! Structured check reports shared by every verification suite.
//!
//! A report is a flat list of named checks, each passing or failing with an
//! optional counterexample witness.  Reports render as human-readable text or
//! as JSON with the schema
//! `{command, operad, instance, checks: [{name, paper_ref, status,
//! counterexample?}], seed, bounds}`.

use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One verified equation (or property) instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    /// Stable identifier, e.g. `"DC.4"` or `"tangent.c-involution"`.
    pub name: String,
    /// Which statement the check instantiates.
    pub paper_ref: String,
    pub status: Status,
    /// A witness term for failures, omitted on passes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// A full report for one command / suite invocation.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Report {
    pub command: String,
    pub operad: String,
    pub instance: String,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub bounds: String,
}

impl Report {
    pub fn new(command: &str, operad: &str, instance: &str) -> Self {
        Report {
            command: command.to_string(),
            operad: operad.to_string(),
            instance: instance.to_string(),
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bounds(mut self, bounds: &str) -> Self {
        self.bounds = bounds.to_string();
        self
    }

    /// Records a passing check.
    pub fn pass(&mut self, name: &str, paper_ref: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            paper_ref: paper_ref.to_string(),
            status: Status::Pass,
            counterexample: None,
        });
    }

    /// Records a failing check with its witness.
    pub fn fail(&mut self, name: &str, paper_ref: &str, counterexample: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            paper_ref: paper_ref.to_string(),
            status: Status::Fail,
            counterexample: Some(counterexample.to_string()),
        });
    }

    /// Records `ok` as a pass, or a failure carrying `witness()`.
    pub fn check(&mut self, name: &str, paper_ref: &str, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(name, paper_ref);
        } else {
            self.fail(name, paper_ref, &witness());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Appends another report's checks (name-prefixed) into this one.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    /// Human-readable rendering: one line per check plus a summary line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("[{status}] {}", c.name));
            if let Some(w) = &c.counterexample {
                out.push_str(&format!("  counterexample: {w}"));
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{}/{} checks passed\n",
            self.checks.len() - failed,
            self.checks.len()
        ));
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip_and_summary() {
        let mut r = Report::new("check-dc", "com", "S(Com,-)").with_seed(7);
        r.pass("DC.1", "differential combinator axioms");
        r.fail("DC.2", "differential combinator axioms", "(c2;x,y)");
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        let json = r.render_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks.len(), 2);
        assert_eq!(back.seed, 7);
        assert!(r.render_text().contains("1/2 checks passed"));
    }
}
