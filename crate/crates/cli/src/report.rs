//! The structured report emitted by every command.
//!
//! One self-describing JSON document per invocation; the layout is
//! documented in `docs/report-schema.md` and versioned through [`SCHEMA`].

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "magsym-report/1";

/// Per-item outcome.  `Undecided` never fails a run on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub id: String,
    pub outcome: Outcome,
    /// Failures of quarantined items are documented and do not affect the
    /// exit status.
    pub quarantined: bool,
    /// One-line human summary.
    pub summary: String,
    /// Further human-readable lines (α, failing tags, brackets, ...).
    pub details: Vec<String>,
    pub annotations: Vec<String>,
    /// Command-specific structured payload.
    pub data: Value,
}

impl Item {
    pub fn new(id: impl Into<String>, outcome: Outcome, summary: impl Into<String>, data: Value) -> Self {
        Item {
            id: id.into(),
            outcome,
            quarantined: false,
            summary: summary.into(),
            details: Vec::new(),
            annotations: Vec::new(),
            data,
        }
    }

    /// A failure that counts against the exit status.
    pub fn blocking(&self) -> bool {
        self.outcome == Outcome::Fail && !self.quarantined
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub undecided: usize,
    pub quarantined: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: CommandEcho,
    pub items: Vec<Item>,
    pub summary: Summary,
    pub exit_status: i32,
}

impl Report {
    pub fn new(name: &str, args: Vec<String>, items: Vec<Item>) -> Self {
        let mut summary = Summary { total: items.len(), ..Summary::default() };
        for it in &items {
            match it.outcome {
                Outcome::Pass => summary.passed += 1,
                Outcome::Fail => summary.failed += 1,
                Outcome::Undecided => summary.undecided += 1,
            }
            if it.quarantined {
                summary.quarantined += 1;
            }
        }
        let exit_status = if items.iter().any(Item::blocking) { 1 } else { 0 };
        Report { schema: SCHEMA, command: CommandEcho { name: name.into(), args }, items, summary, exit_status }
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human summary for standard output.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for it in &self.items {
            let tag = match (it.outcome, it.quarantined) {
                (Outcome::Pass, false) => "ok",
                (Outcome::Pass, true) => "ok*",
                (Outcome::Fail, false) => "FAIL",
                (Outcome::Fail, true) => "fail*",
                (Outcome::Undecided, _) => "??",
            };
            out.push_str(&format!("[{:>5}] {}: {}\n", tag, it.id, it.summary));
            for d in &it.details {
                out.push_str(&format!("          {}\n", d));
            }
            for a in &it.annotations {
                out.push_str(&format!("          note: {}\n", a));
            }
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} items: {} passed, {} failed, {} undecided, {} quarantined (*); exit {}\n",
            s.total, s.passed, s.failed, s.undecided, s.quarantined, self.exit_status
        ));
        out
    }
}
