//! Claim records and the versioned JSON report.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactla::Subspace;
use crate::gfield::GaloisField;

pub const SCHEMA: &str = "algdeg-report/1";

/// Keys of the acceptance inventory; every claim carries exactly one.
pub const ANCHORS: [&str; 10] = [
    "dims",
    "spin-identities",
    "intersections",
    "linear-degeneration",
    "transvection-reach",
    "submodule-survey",
    "composition-series",
    "gamma-v",
    "lattice-diagrams",
    "trace-biconditional",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Falsified,
    Inconclusive,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    #[serde(default)]
    pub expected: Value,
    #[serde(default)]
    pub computed: Value,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl Claim {
    pub fn new(name: impl Into<String>, anchor: &str, status: Status) -> Self {
        Claim {
            name: name.into(),
            anchor: anchor.to_string(),
            status,
            expected: Value::Null,
            computed: Value::Null,
            data: Value::Null,
            wall_ms: None,
        }
    }

    /// Verified iff `expected == computed`.
    pub fn compare(name: impl Into<String>, anchor: &str, expected: Value, computed: Value) -> Self {
        let status = if expected == computed { Status::Verified } else { Status::Falsified };
        Claim { expected, computed, ..Claim::new(name, anchor, status) }
    }

    pub fn truth(name: impl Into<String>, anchor: &str, holds: bool) -> Self {
        Claim::compare(name, anchor, json!(true), json!(holds))
    }

    /// Exact subspace equality; both sides are serialized in full on mismatch.
    pub fn subspace_eq(
        name: impl Into<String>,
        anchor: &str,
        expected: &Subspace<GaloisField>,
        computed: &Subspace<GaloisField>,
    ) -> Self {
        if expected == computed {
            Claim {
                expected: json!({"dim": expected.dim()}),
                computed: json!({"dim": computed.dim()}),
                ..Claim::new(name, anchor, Status::Verified)
            }
        } else {
            Claim {
                expected: expected.to_json(),
                computed: computed.to_json(),
                ..Claim::new(name, anchor, Status::Falsified)
            }
        }
    }

    pub fn skipped(name: impl Into<String>, anchor: &str, reason: &str) -> Self {
        Claim { data: json!({"reason": reason}), ..Claim::new(name, anchor, Status::Skipped) }
    }

    pub fn inconclusive(name: impl Into<String>, anchor: &str, data: Value) -> Self {
        Claim { data, ..Claim::new(name, anchor, Status::Inconclusive) }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Verified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            claims: Vec::new(),
        }
    }

    pub fn extend(&mut self, claims: impl IntoIterator<Item = Claim>) {
        self.claims.extend(claims);
    }

    pub fn count(&self, status: Status) -> usize {
        self.claims.iter().filter(|c| c.status == status).count()
    }

    /// Worst outcome: falsified beats inconclusive beats everything else.
    pub fn outcome(&self) -> Status {
        if self.count(Status::Falsified) > 0 {
            Status::Falsified
        } else if self.count(Status::Inconclusive) > 0 {
            Status::Inconclusive
        } else {
            Status::Verified
        }
    }

    /// 0 verified, 1 falsified, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.outcome() {
            Status::Falsified => 1,
            Status::Inconclusive => 3,
            _ => 0,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Summary of a claim list, used by suites that bundle sub-claims.
pub fn all_verified(claims: &[Claim]) -> bool {
    claims.iter().all(|c| matches!(c.status, Status::Verified | Status::Skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut r = Report::new("test", json!({}));
        assert_eq!(r.exit_code(), 0);
        r.extend([Claim::truth("a", "dims", true)]);
        assert_eq!(r.exit_code(), 0);
        r.extend([Claim::inconclusive("b", "dims", json!(null))]);
        assert_eq!(r.exit_code(), 3);
        r.extend([Claim::truth("c", "dims", false)]);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn roundtrip() {
        let mut r = Report::new("dims", json!({"n": [3]}));
        r.extend([Claim::compare("dim C", "dims", json!(18), json!(18)), Claim::skipped("x", "dims", "why")]);
        let s = r.to_json_string();
        assert_eq!(Report::from_json_str(&s).unwrap(), r);
        assert!(s.contains("\"schema\": \"algdeg-report/1\""));
    }
}
