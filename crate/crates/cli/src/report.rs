//! Machine-readable run reports.
//!
//! Serialized through `serde_json::Value`, whose objects keep keys sorted, so
//! the text depends only on the records and never on construction order.

use std::fmt;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded but not a pass/fail check (e.g. not applicable to the input).
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub check: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub details: Map<String, Value>,
    pub elapsed_ms: Option<u64>,
}

impl Record {
    pub fn new(check: impl Into<String>, anchor: impl Into<String>, verdict: Verdict) -> Self {
        Record {
            check: check.into(),
            anchor: anchor.into(),
            verdict,
            witness: None,
            details: Map::new(),
            elapsed_ms: None,
        }
    }

    pub fn zero(check: impl Into<String>, anchor: impl Into<String>, witness: Option<String>) -> Self {
        let verdict = if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Record {
            witness,
            ..Record::new(check, anchor, verdict)
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    fn to_value(&self) -> Value {
        let mut v = json!({
            "check": self.check,
            "anchor": self.anchor,
            "verdict": self.verdict.to_string(),
            "witness": self.witness,
            "details": self.details,
        });
        if let Some(ms) = self.elapsed_ms {
            v["elapsed_ms"] = ms.into();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Input {
    pub id: String,
    pub sha256: String,
    pub kind: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub input: Option<Input>,
    pub options: Map<String, Value>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            input: None,
            options: Map::new(),
            records: Vec::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl Into<Value>) {
        self.options.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    fn sorted(&self) -> Vec<&Record> {
        let mut rs: Vec<&Record> = self.records.iter().collect();
        rs.sort_by(|a, b| a.check.cmp(&b.check));
        rs
    }

    pub fn to_value(&self) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "input": self.input.as_ref().map(|i| json!({
                "id": i.id,
                "sha256": i.sha256,
                "kind": i.kind,
                "dim": i.dim,
            })),
            "options": self.options,
            "records": self.sorted().into_iter().map(Record::to_value).collect::<Vec<_>>(),
            "summary": {
                "pass": self.count(Verdict::Pass),
                "fail": self.count(Verdict::Fail),
                "info": self.count(Verdict::Info),
            },
        })
    }

    /// Canonical JSON text, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report values serialize");
        s.push('\n');
        s
    }

    /// One line per record, for the terminal.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.sorted() {
            out.push_str(&format!("{:<4} {}", r.verdict, r.check));
            if let Some(w) = &r.witness {
                out.push_str(&format!("  [{w}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} pass, {} fail, {} info\n",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Info)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_regardless_of_insertion_order() {
        let mut a = Report::new("verify");
        a.option("order", 4);
        a.option("seed", 1);
        a.push(Record::zero("b", "x", None).detail("z", 1).detail("a", 2));
        a.push(Record::zero("a", "y", Some("w".into())));
        let mut b = Report::new("verify");
        b.option("seed", 1);
        b.option("order", 4);
        b.push(Record::zero("a", "y", Some("w".into())));
        b.push(Record::zero("b", "x", None).detail("a", 2).detail("z", 1));
        assert_eq!(a.to_json(), b.to_json());
        assert!(!a.passed());
        let text = a.to_json();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }
}
