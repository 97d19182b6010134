//! Run reports: the stable, diffable record of one invocation. A report
//! embeds the parsed inputs (with canonical digests) and every verdict with
//! its certificate, so `conekit verify` can replay the run offline.

use conekit::Verdict;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// The subcommand path, e.g. ["cone", "member"].
    pub command: Vec<String>,
    pub mode: String,
    pub tol: f64,
    pub seed: u64,
    pub budget: usize,
    pub inputs: Vec<InputRecord>,
    pub results: Vec<ResultRecord>,
    pub timing_ms: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputRecord {
    pub name: String,
    /// SHA-256 of the canonical serialization of `content`.
    pub sha256: String,
    pub content: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Command-specific payload (cones, reports, extension matrices, ...).
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

impl RunReport {
    /// Exit code: 3 is reserved for input errors upstream; otherwise any No
    /// dominates, then any Unknown, then success.
    pub fn exit_code(&self) -> i32 {
        let mut unknown = false;
        for r in &self.results {
            match &r.verdict {
                Some(Verdict::No { .. }) => return 1,
                Some(Verdict::Unknown { .. }) => unknown = true,
                _ => {}
            }
        }
        if unknown {
            2
        } else {
            0
        }
    }
}
