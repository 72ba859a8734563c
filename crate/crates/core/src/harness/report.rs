//! Run reports of the `verify` command.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::inequalities::{SuiteConfig, SuiteRun, Summary, TrialOutcome, TrialStatus};
use crate::numrange::SweepOptions;
use crate::tol;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every tolerance that influenced a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceRecord {
    pub verdict: f64,
    pub herm: f64,
    pub recon: f64,
    pub membership: f64,
    pub borderline_factor: f64,
    pub condition: f64,
    pub sweep: SweepOptions,
}

impl ToleranceRecord {
    pub fn new(verdict: f64, sweep: SweepOptions) -> Self {
        Self {
            verdict,
            herm: tol::HERM_TOL,
            recon: tol::RECON_TOL,
            membership: tol::MEMBERSHIP_TOL,
            borderline_factor: tol::BORDERLINE_FACTOR,
            condition: tol::CONDITION_TOL,
            sweep,
        }
    }
}

/// Fields that vary between otherwise identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    /// SHA-256 of the serialized configuration.
    pub spec_fingerprint: String,
    pub master_seed: u64,
    pub config: SuiteConfig,
    pub tolerances: ToleranceRecord,
    pub trials: Vec<TrialOutcome>,
    pub summary: Summary,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

pub fn config_fingerprint(config: &SuiteConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("suite configs always serialize");
    hex::encode(Sha256::digest(bytes))
}

fn warnings(trials: &[TrialOutcome]) -> Vec<String> {
    let mut out = Vec::new();
    for t in trials {
        if t.borderline {
            let r = t.membership_residual.unwrap_or(f64::NAN);
            out.push(format!("trial {}: borderline membership residual {r:e}", t.index));
        }
        if let TrialStatus::Error { kind, message } = &t.status {
            out.push(format!("trial {}: {kind}: {message}", t.index));
        }
    }
    out
}

impl RunReport {
    pub fn new(config: &SuiteConfig, run: SuiteRun, timing: Timing) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            spec_fingerprint: config_fingerprint(config),
            master_seed: config.seed,
            config: config.clone(),
            tolerances: ToleranceRecord::new(config.tol, config.sweep),
            warnings: warnings(&run.trials),
            trials: run.trials,
            summary: run.summary,
            timing,
        }
    }

    pub fn violations(&self) -> usize {
        self.summary.violations
    }

    /// The report with the timing fields zeroed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing { wall_seconds: 0.0, jobs: 0 }, ..self.clone() }
    }
}
