//! Check records and their JSON form.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Unresolved,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unresolved => "UNRESOLVED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    /// The mathematical statement the record checks.
    pub anchor: String,
    pub status: Status,
    pub measured: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, status: Status) -> Self {
        Record {
            name: name.into(),
            anchor: anchor.into(),
            status,
            measured: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            note: String::new(),
        }
    }

    pub fn measure(mut self, key: &str, v: f64) -> Self {
        self.measured.insert(key.to_string(), v);
        self
    }

    pub fn tolerance(mut self, key: &str, v: f64) -> Self {
        self.tolerances.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.note = text.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap_or_default();
        s.push('\n');
        s
    }

    /// One line per record followed by a totals line.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("{:<10} {}\n", r.status.label(), r.name));
        }
        out.push_str(&format!(
            "{}: {} pass, {} fail, {} unresolved\n",
            self.suite,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Unresolved)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_stable_and_uppercase() {
        let mut r = Report::new("demo");
        r.push(Record::new("b", "x", Status::Unresolved).measure("z", 1.0).measure("a", 2.0));
        let j = r.to_json();
        assert!(j.contains("\"UNRESOLVED\""));
        assert!(j.find("\"a\"").unwrap() < j.find("\"z\"").unwrap());
        assert_eq!(j, r.clone().to_json());
        assert!(r.passed());
        r.push(Record::new("c", "y", Status::Fail));
        assert!(!r.passed());
    }
}
