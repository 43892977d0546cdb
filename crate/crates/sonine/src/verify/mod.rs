//! Verification suites: named collections of solver runs, each checked
//! against a stated property and reported case by case.

pub mod blowup;
pub mod convergence;
pub mod decay;
pub mod invariance;
pub mod quasilinear;
pub mod sonine;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sonine_core::{ScalarTrace, SolveReport};

use crate::output::{self, serialize_f64, SCHEMA_VERSION};

pub use blowup::BlowupConfig;
pub use convergence::ConvergenceConfig;
pub use decay::DecayConfig;
pub use invariance::InvarianceConfig;
pub use quasilinear::QuasilinearConfig;
pub use sonine::SonineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteName {
    Sonine,
    Invariance,
    Decay,
    Blowup,
    Quasilinear,
    Convergence,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::Sonine,
        SuiteName::Invariance,
        SuiteName::Decay,
        SuiteName::Blowup,
        SuiteName::Quasilinear,
        SuiteName::Convergence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Sonine => "sonine",
            SuiteName::Invariance => "invariance",
            SuiteName::Decay => "decay",
            SuiteName::Blowup => "blowup",
            SuiteName::Quasilinear => "quasilinear",
            SuiteName::Convergence => "convergence",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Settings of every suite, including the fit windows of the regime checks.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub sonine: SonineConfig,
    pub invariance: InvarianceConfig,
    pub decay: DecayConfig,
    pub blowup: BlowupConfig,
    pub quasilinear: QuasilinearConfig,
    pub convergence: ConvergenceConfig,
}

impl VerifyConfig {
    pub fn parse(text: &str) -> Result<Self, crate::config::ConfigError> {
        toml::from_str(text).map_err(|e| crate::config::ConfigError {
            path: None,
            line: crate::config::error_line(text, &e),
            message: e.message().trim().to_string(),
        })
    }
}

/// One asserted (or reported) property of a case.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub claim: &'static str,
    #[serde(serialize_with = "serialize_f64")]
    pub measured: f64,
    pub expected: String,
    /// Reported only; does not affect the verdict.
    pub informational: bool,
    pub pass: bool,
}

impl Check {
    pub fn new(claim: &'static str, measured: f64, expected: impl Into<String>, pass: bool) -> Self {
        Self { claim, measured, expected: expected.into(), informational: false, pass }
    }

    pub fn info(claim: &'static str, measured: f64, expected: impl Into<String>, pass: bool) -> Self {
        Self { claim, measured, expected: expected.into(), informational: true, pass }
    }

    pub fn counts(&self) -> bool {
        !self.informational
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CaseResult {
    pub case: String,
    pub config_sha256: String,
    pub checks: Vec<Check>,
    /// A numerical error that stopped the case.
    pub error: Option<String>,
    pub artifact: Option<PathBuf>,
}

impl CaseResult {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().filter(|c| c.counts()).all(|c| c.pass)
    }

    pub fn check(&self, claim: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.claim == claim)
    }
}

/// Data a case hands to the aggregator for its CSV file.
#[derive(Debug, Clone)]
pub enum Artifact {
    None,
    Report(Box<SolveReport>),
    Trace(ScalarTrace),
    Table { header: Vec<&'static str>, rows: Vec<Vec<f64>> },
}

pub struct CaseOutput {
    pub result: CaseResult,
    pub artifact: Artifact,
}

impl CaseOutput {
    pub fn new(case: impl Into<String>, params: &serde_json::Value, checks: Vec<Check>, artifact: Artifact) -> Self {
        Self {
            result: CaseResult {
                case: case.into(),
                config_sha256: digest(params),
                checks,
                error: None,
                artifact: None,
            },
            artifact,
        }
    }

    pub fn failed(case: impl Into<String>, params: &serde_json::Value, err: impl fmt::Display) -> Self {
        Self {
            result: CaseResult {
                case: case.into(),
                config_sha256: digest(params),
                checks: Vec::new(),
                error: Some(err.to_string()),
                artifact: None,
            },
            artifact: Artifact::None,
        }
    }
}

/// SHA-256 of the canonical (sorted-key) JSON of the case parameters.
pub fn digest(params: &serde_json::Value) -> String {
    let text = serde_json::to_string(params).expect("serializable");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

type Job<'a> = Box<dyn Fn() -> CaseOutput + Send + Sync + 'a>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    ClaimViolation,
    NumericalFailure,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::NumericalFailure => 2,
            Verdict::ClaimViolation => 3,
        }
    }

    fn worst(self, other: Verdict) -> Verdict {
        let rank = |v: Verdict| match v {
            Verdict::Pass => 0,
            Verdict::ClaimViolation => 1,
            Verdict::NumericalFailure => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteResult {
    pub schema_version: u32,
    pub suite: &'static str,
    pub verdict: Verdict,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub cases: Vec<CaseResult>,
}

impl SuiteResult {
    fn from_cases(suite: SuiteName, cases: Vec<CaseResult>) -> Self {
        let errored = cases.iter().filter(|c| c.error.is_some()).count();
        let passed = cases.iter().filter(|c| c.pass()).count();
        let failed = cases.len() - passed - errored;
        let verdict = if errored > 0 {
            Verdict::NumericalFailure
        } else if failed > 0 {
            Verdict::ClaimViolation
        } else {
            Verdict::Pass
        };
        Self { schema_version: SCHEMA_VERSION, suite: suite.as_str(), verdict, passed, failed, errored, cases }
    }

    pub fn case(&self, name: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.case == name)
    }
}

/// Aggregate of several suites (`verify all`).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerifySummary {
    pub schema_version: u32,
    pub verdict: Verdict,
    pub suites: Vec<SuiteVerdict>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteVerdict {
    pub suite: &'static str,
    pub verdict: Verdict,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
}

fn jobs_for(name: SuiteName, cfg: &VerifyConfig) -> Vec<Job<'_>> {
    match name {
        SuiteName::Sonine => sonine::jobs(&cfg.sonine),
        SuiteName::Invariance => invariance::jobs(&cfg.invariance),
        SuiteName::Decay => decay::jobs(&cfg.decay),
        SuiteName::Blowup => blowup::jobs(&cfg.blowup),
        SuiteName::Quasilinear => quasilinear::jobs(&cfg.quasilinear),
        SuiteName::Convergence => convergence::jobs(&cfg.convergence),
    }
}

/// Runs a suite on `jobs` worker threads (0 = all cores). Files are written
/// under `out/<suite>/` when `out` is given.
pub fn run_suite(name: SuiteName, cfg: &VerifyConfig, out: Option<&Path>, jobs: usize) -> std::io::Result<SuiteResult> {
    let work = jobs_for(name, cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(std::io::Error::other)?;
    let outputs: Vec<CaseOutput> = pool.install(|| work.par_iter().map(|job| job()).collect());
    let mut cases = Vec::with_capacity(outputs.len());
    for CaseOutput { mut result, artifact } in outputs {
        if let Some(dir) = out {
            let path = dir.join(name.as_str()).join(format!("{}.csv", result.case));
            let written = match &artifact {
                Artifact::None => false,
                Artifact::Report(r) => {
                    output::write_report_csv(r, &path)?;
                    true
                }
                Artifact::Trace(t) => {
                    output::write_trace_csv(t, &path)?;
                    true
                }
                Artifact::Table { header, rows } => {
                    output::write_table_csv(&path, header, rows)?;
                    true
                }
            };
            if written {
                result.artifact = Some(PathBuf::from(name.as_str()).join(format!("{}.csv", result.case)));
            }
        }
        cases.push(result);
    }
    let suite = SuiteResult::from_cases(name, cases);
    if let Some(dir) = out {
        output::write_json(&suite, &dir.join(name.as_str()).join("summary.json"))?;
    }
    Ok(suite)
}

/// Runs several suites in order and writes the aggregated `summary.json`.
pub fn run_suites(
    names: &[SuiteName],
    cfg: &VerifyConfig,
    out: Option<&Path>,
    jobs: usize,
) -> std::io::Result<(VerifySummary, Vec<SuiteResult>)> {
    let mut results = Vec::new();
    let mut verdict = Verdict::Pass;
    let mut suites = Vec::new();
    for &name in names {
        let r = run_suite(name, cfg, out, jobs)?;
        verdict = verdict.worst(r.verdict);
        suites.push(SuiteVerdict {
            suite: r.suite,
            verdict: r.verdict,
            passed: r.passed,
            failed: r.failed,
            errored: r.errored,
        });
        results.push(r);
    }
    let summary = VerifySummary { schema_version: SCHEMA_VERSION, verdict, suites };
    if let Some(dir) = out {
        output::write_json(&summary, &dir.join("summary.json"))?;
    }
    Ok((summary, results))
}

/// `max(-min, max - 1, 0)` over a report's nodal ranges.
pub(crate) fn range_excess(report: &SolveReport) -> f64 {
    let lo = report.range_min.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = report.range_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (-lo).max(hi - 1.0).max(0.0)
}
