//! Machine-readable verification reports.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: String,
    /// Sampler stream the failing draw came from; together with the report
    /// seed it regenerates the inputs.
    pub stream: u64,
    /// Index of the failing sample within the check.
    pub sample: usize,
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub group: String,
    pub status: Status,
    pub samples: usize,
    pub elapsed_ms: u128,
    pub checks: Vec<CheckResult>,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub rng: &'static str,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report with every timing field zeroed, for determinism checks.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for s in &mut r.suites {
            s.elapsed_ms = 0;
        }
        r
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.suites
            .iter()
            .map(|s| {
                let status = match s.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                };
                format!(
                    "{status:4} {:13} {:18} {:6} samples {:6} ms",
                    s.name, s.group, s.samples, s.elapsed_ms
                )
            })
            .collect()
    }
}
