//! Verdict reports: every numeric claim traces back to an operation
//! output, the configuration is echoed in resolved form, and the exit
//! code mirrors the verdict for scripting.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSweepEvidence {
    pub mode_i: usize,
    pub mode_j: usize,
    pub max_diff: f64,
    pub argmax_omega: f64,
    pub verdict_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEvidence {
    /// Row-major entries of the symmetric certificate matrix.
    pub p_matrix: Vec<Vec<f64>>,
    pub margins: Vec<f64>,
    pub p_min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetCertificateEvidence {
    pub p_matrix: Vec<Vec<f64>>,
    pub flow_margin: f64,
    pub jump_margin: f64,
    pub p_min_eig: f64,
    /// `(beta, p_r)` recovered from the structural row pattern.
    pub hbeta_pattern: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaIntervalEvidence {
    pub lo: f64,
    pub hi: f64,
    pub endpoint_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventCounts {
    pub switches: usize,
    pub resets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub final_state: Vec<f64>,
    pub final_output: f64,
    pub final_norm: f64,
    pub events: EventCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evidence {
    Switching {
        mode_margins: Vec<f64>,
        pair_sweeps: Vec<PairSweepEvidence>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<CertificateEvidence>,
    },
    Reset {
        beta: f64,
        p_r: f64,
        hurwitz: bool,
        is_spr: bool,
        min_phase_margin: f64,
        /// The flow condition underlying the test is only sufficient at
        /// base orders <= 2/3.
        low_order_caveat: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<ResetCertificateEvidence>,
    },
    BetaSweep {
        intervals: Vec<BetaIntervalEvidence>,
        hurwitz: bool,
        low_order_caveat: bool,
    },
    Simulation {
        /// How initial conditions and fractional memory are handled.
        scheme_notes: Vec<String>,
        trajectories: Vec<TrajectorySummary>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub tool_version: String,
    pub kind: String,
    pub verdict: String,
    pub exit_code: i32,
    pub wall_clock_seconds: f64,
    /// Fully resolved configuration (command-line overrides folded in);
    /// re-running it reproduces this report modulo the wall clock.
    pub config: serde_json::Value,
    pub evidence: Evidence,
    /// Files written next to the report, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl VerdictReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// Equality modulo the wall-clock field.
    pub fn same_outcome(&self, other: &VerdictReport) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.wall_clock_seconds = 0.0;
        b.wall_clock_seconds = 0.0;
        a == b
    }
}
