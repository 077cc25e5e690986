//! Check results and suite reports, serializable to JSON and plain text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Number of instances verified.
    pub checked: usize,
    /// Instances excluded because evaluation left a truncation window.
    pub boundary: usize,
}

impl Check {
    pub fn pass(name: impl Into<String>, checked: usize) -> Self {
        Check { name: name.into(), status: Status::Pass, witness: None, detail: None, checked, boundary: 0 }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
            detail: None,
            checked: 0,
            boundary: 0,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            witness: None,
            detail: Some(reason.into()),
            checked: 0,
            boundary: 0,
        }
    }

    pub fn from_result(name: impl Into<String>, r: Result<usize, String>) -> Self {
        match r {
            Ok(n) => Check::pass(name, n),
            Err(w) => Check::fail(name, w),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn with_boundary(mut self, b: usize) -> Self {
        self.boundary = b;
        self
    }

    pub fn with_checked(mut self, n: usize) -> Self {
        self.checked = n;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), checks: Vec::new(), params: BTreeMap::new(), timing_ms: None }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn param(&mut self, k: &str, v: impl Into<serde_json::Value>) {
        self.params.insert(k.to_string(), v.into());
    }

    pub fn extend(&mut self, other: Report) {
        for mut c in other.checks {
            if !other.suite.is_empty() && other.suite != self.suite {
                c.name = format!("{}/{}", other.suite, c.name);
            }
            self.checks.push(c);
        }
        for (k, v) in other.params {
            self.params.entry(k).or_insert(v);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name || c.name.ends_with(&format!("/{name}")))
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            serde_json::to_string(self).expect("report serializes")
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite {}", self.suite);
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  params: {}", p.join(" "));
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let _ = write!(s, "  [{tag}] {} ({} checked", c.name, c.checked);
            if c.boundary > 0 {
                let _ = write!(s, ", {} boundary", c.boundary);
            }
            let _ = writeln!(s, ")");
            if let Some(d) = &c.detail {
                let _ = writeln!(s, "         {d}");
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "         witness: {w}");
            }
        }
        let _ = writeln!(s, "  verdict: {}", if self.all_pass() { "pass" } else { "fail" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_roundtrip_and_verdict() {
        let mut r = Report::new("lie");
        r.push(Check::pass("jacobi", 8));
        r.push(Check::skipped("closure", "nothing to do"));
        assert!(r.all_pass());
        r.push(Check::fail("antisymmetry", "(e,f)"));
        assert!(!r.all_pass());
        let v: serde_json::Value = serde_json::from_str(&r.to_json(false)).unwrap();
        assert_eq!(v["checks"][2]["status"], "fail");
        assert!(r.to_text().contains("[FAIL] antisymmetry"));
    }
}
