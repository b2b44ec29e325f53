//! Versioned JSON reports shared by every command.

use serde::Serialize;
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

/// Environment variable that pins the report timestamp, following the
/// reproducible-builds convention.
pub const TIMESTAMP_ENV: &str = "SOURCE_DATE_EPOCH";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Placeholder for `git describe`; the crate version is used.
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp_unix: u64,
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        Provenance {
            version: concat!("macsk-", env!("CARGO_PKG_VERSION")).to_string(),
            seed,
            timestamp_unix: timestamp(),
        }
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var(TIMESTAMP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: Status,
}

impl Stage {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Stage {
            name: name.into(),
            status: Status::from_ok(ok),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub provenance: Provenance,
    /// Per-stage status; the overall status is the conjunction.
    pub stages: Vec<Stage>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str, params: Value, results: Value, seed: Option<u64>, stages: Vec<Stage>) -> Self {
        let status = Status::from_ok(stages.iter().all(|s| s.status == Status::Pass));
        Report {
            report_version: REPORT_VERSION,
            command: command.to_string(),
            params,
            results,
            provenance: Provenance::new(seed),
            stages,
            status,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
