//! Runs a list of checks and emits a deterministic JSON report plus a CSV
//! projection.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checks::{CheckConfig, CheckOutcome, Verdict, DEFAULT_REPLICATES, DEFAULT_Z};
use crate::error::{Error, Result};
use crate::harness::{derive_seed, GENERATOR_ID};

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

fn default_z() -> f64 {
    DEFAULT_Z
}

/// Suite configuration. Per-check `replicates`, `seed` and `z` override the
/// suite-level values; a check without a seed gets `derive_seed(seed, index)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_z")]
    pub z: f64,
    /// Worker threads. Never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::Config(format!("replicates must be >= 2, got {}", self.replicates)));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::Config(format!("z must be > 0, got {}", self.z)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// Every inequality held.
    Hold,
    /// At least one inequality was violated.
    Violation,
    /// No violation, but at least one verdict was inconclusive.
    Inconclusive,
    /// Trend diagnostic showed its documented pattern.
    TrendPattern,
    /// Trend diagnostic did not show its documented pattern.
    TrendNoPattern,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub index: usize,
    pub theorem: String,
    pub seed: u64,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub checks: usize,
    pub hold: usize,
    pub violation: usize,
    pub inconclusive: usize,
    pub trend: usize,
    pub error: usize,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub generator: String,
    pub seed: u64,
    pub replicates: usize,
    pub z: f64,
    pub entries: Vec<CheckEntry>,
    pub summary: SuiteSummary,
}

fn status_of(outcome: &CheckOutcome) -> CheckStatus {
    match outcome {
        CheckOutcome::Trend { report } if report.pattern_holds => CheckStatus::TrendPattern,
        CheckOutcome::Trend { .. } => CheckStatus::TrendNoPattern,
        CheckOutcome::Inequalities { reports } => {
            if reports.iter().any(|r| r.verdict == Verdict::Violation) {
                CheckStatus::Violation
            } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
                CheckStatus::Inconclusive
            } else {
                CheckStatus::Hold
            }
        }
    }
}

/// Exit status: 2 on any error, else 1 on any violation, else 0.
pub fn exit_code(entries: &[CheckEntry]) -> i32 {
    if entries.iter().any(|e| e.status == CheckStatus::Error) {
        2
    } else if entries.iter().any(|e| e.status == CheckStatus::Violation) {
        1
    } else {
        0
    }
}

/// Runs every check in order on the current rayon pool. Check errors are
/// recorded per entry; only an invalid suite config is an `Err`.
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport> {
    config.validate()?;
    let entries: Vec<CheckEntry> = config
        .checks
        .iter()
        .enumerate()
        .map(|(index, check)| {
            let mut check = check.clone();
            check.replicates = check.replicates.or(Some(config.replicates));
            check.z = check.z.or(Some(config.z));
            let seed = check.seed.unwrap_or_else(|| derive_seed(config.seed, index as u64));
            let theorem = check.theorem.id().to_string();
            match check.run(seed) {
                Ok(outcome) => CheckEntry {
                    index,
                    theorem,
                    seed,
                    status: status_of(&outcome),
                    outcome: Some(outcome),
                    error: None,
                },
                Err(e) => CheckEntry { index, theorem, seed, status: CheckStatus::Error, outcome: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let count = |s: CheckStatus| entries.iter().filter(|e| e.status == s).count();
    let summary = SuiteSummary {
        checks: entries.len(),
        hold: count(CheckStatus::Hold),
        violation: count(CheckStatus::Violation),
        inconclusive: count(CheckStatus::Inconclusive),
        trend: count(CheckStatus::TrendPattern) + count(CheckStatus::TrendNoPattern),
        error: count(CheckStatus::Error),
        exit_code: exit_code(&entries),
    };
    Ok(SuiteReport {
        generator: GENERATOR_ID.to_string(),
        seed: config.seed,
        replicates: config.replicates,
        z: config.z,
        entries,
        summary,
    })
}

/// One CSV row per inequality report or trend point.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    index: usize,
    theorem: &'a str,
    seed: u64,
    case: String,
    relation: &'a str,
    lhs: Option<f64>,
    lhs_se: Option<f64>,
    rhs: Option<f64>,
    rhs_se: Option<f64>,
    margin: Option<f64>,
    margin_se: Option<f64>,
    verdict: String,
}

fn csv_rows(report: &SuiteReport) -> Vec<CsvRow<'_>> {
    let mut rows = Vec::new();
    for e in &report.entries {
        let blank = |case: String, relation, verdict: String| CsvRow {
            index: e.index,
            theorem: &e.theorem,
            seed: e.seed,
            case,
            relation,
            lhs: None,
            lhs_se: None,
            rhs: None,
            rhs_se: None,
            margin: None,
            margin_se: None,
            verdict,
        };
        match &e.outcome {
            None => rows.push(blank(e.error.clone().unwrap_or_default(), "", "ERROR".into())),
            Some(CheckOutcome::Inequalities { reports }) => {
                for r in reports {
                    rows.push(CsvRow {
                        lhs: Some(r.lhs.mean),
                        lhs_se: Some(r.lhs.se),
                        rhs: Some(r.rhs.mean),
                        rhs_se: Some(r.rhs.se),
                        margin: Some(r.margin),
                        margin_se: Some(r.margin_se),
                        ..blank(
                            r.case.clone(),
                            match r.relation {
                                crate::checks::Relation::Le => "le",
                                crate::checks::Relation::Ge => "ge",
                            },
                            serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                        )
                    });
                }
            }
            Some(CheckOutcome::Trend { report }) => {
                for p in &report.points {
                    let dims: Vec<String> = p.dims.iter().map(|d| d.to_string()).collect();
                    rows.push(CsvRow {
                        lhs: Some(p.value.mean),
                        lhs_se: Some(p.value.se),
                        ..blank(format!("box={}", dims.join("x")), "trend", report.label.clone())
                    });
                }
            }
        }
    }
    rows
}

/// Writes `suite.json` and `suite.csv` into `dir`, creating it if needed.
pub fn write_suite(report: &SuiteReport, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut json = serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
    json.push('\n');
    fs::write(dir.join("suite.json"), json).map_err(io)?;
    let mut w = csv::Writer::from_path(dir.join("suite.csv")).map_err(|e| Error::Config(e.to_string()))?;
    for row in csv_rows(report) {
        w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush().map_err(io)?;
    Ok(())
}
