//! Experiment configuration: JSON schema, strict parsing and conversion
//! into core types.
//!
//! Configs are a tagged union on the `kind` field. Parsing is two-stage
//! (extract `kind`, then deserialize the body with unknown fields denied)
//! so schema violations fail with a field-level diagnostic before any
//! computation runs.

use anyhow::{anyhow, bail, Context};
use fohs_core::nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use fohs_core::reset::{build_closed_loop, CommensurateTransferFunction, ResetControlSystem};
use fohs_core::sim::{ResetMemory, SimOptions, SwitchingRule};
use fohs_core::switching::FrequencyGrid;
use fohs_core::SwitchedSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            omega_min: 1e-4,
            omega_max: 1e4,
            points: 2000,
        }
    }
}

impl GridSpec {
    pub fn to_grid(self) -> anyhow::Result<FrequencyGrid> {
        Ok(FrequencyGrid::new(
            self.omega_min,
            self.omega_max,
            self.points,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfSpec {
    /// Base order q of the commensurate lattice; coefficient k multiplies
    /// s^(k q), ascending.
    pub base_order: f64,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TfSpec {
    pub fn to_tf(&self) -> anyhow::Result<CommensurateTransferFunction> {
        Ok(CommensurateTransferFunction::new(
            self.base_order,
            self.num.clone(),
            self.den.clone(),
        )?)
    }
}

fn default_reset_states() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResetLoopSpec {
    pub plant: TfSpec,
    pub controller: TfSpec,
    pub reset_controller: TfSpec,
    /// Trailing reset-controller states that reset to zero.
    #[serde(default = "default_reset_states")]
    pub reset_states: usize,
    /// Constant reference fed through the reset channel.
    #[serde(default)]
    pub reference: f64,
}

impl ResetLoopSpec {
    pub fn build(&self) -> anyhow::Result<ResetControlSystem> {
        Ok(build_closed_loop(
            &self.plant.to_tf()?,
            &self.controller.to_tf()?,
            &self.reset_controller.to_tf()?,
            self.reset_states,
            self.reference,
        )?)
    }
}

pub fn parse_modes(modes: &[Vec<Vec<f64>>]) -> anyhow::Result<Vec<DMatrix<f64>>> {
    let mut out = Vec::with_capacity(modes.len());
    for (idx, rows) in modes.iter().enumerate() {
        let nrows = rows.len();
        if nrows == 0 {
            bail!("mode {idx}: empty matrix");
        }
        let ncols = rows[0].len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                bail!(
                    "mode {idx}: ragged matrix (row {r} has {} entries, expected {ncols})",
                    row.len()
                );
            }
        }
        if nrows != ncols {
            bail!("mode {idx}: matrix is {nrows}x{ncols}, must be square");
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        out.push(DMatrix::from_row_slice(nrows, ncols, &flat));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Uniformly random mode at every sample.
    ArbitrarySeeded { seed: u64 },
    /// Half-plane regions split by `normal . x` with a random overlap
    /// band of half-width `band`.
    StateRegions {
        normal: Vec<f64>,
        band: f64,
        seed: u64,
    },
}

impl RuleSpec {
    pub fn to_rule(&self, seed_override: Option<u64>) -> SwitchingRule {
        match self.clone() {
            RuleSpec::ArbitrarySeeded { seed } => SwitchingRule::ArbitrarySeeded {
                seed: seed_override.unwrap_or(seed),
            },
            RuleSpec::StateRegions { normal, band, seed } => SwitchingRule::StateRegions {
                normal,
                band,
                seed: seed_override.unwrap_or(seed),
            },
        }
    }

    pub fn with_seed(&self, seed_override: Option<u64>) -> RuleSpec {
        let mut spec = self.clone();
        if let Some(s) = seed_override {
            match &mut spec {
                RuleSpec::ArbitrarySeeded { seed } => *seed = s,
                RuleSpec::StateRegions { seed, .. } => *seed = s,
            }
        }
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetMemorySpec {
    #[default]
    ClearResetStates,
    Retain,
}

impl From<ResetMemorySpec> for ResetMemory {
    fn from(s: ResetMemorySpec) -> Self {
        match s {
            ResetMemorySpec::ClearResetStates => ResetMemory::ClearResetStates,
            ResetMemorySpec::Retain => ResetMemory::Retain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Base name for pairwise sweep CSVs (switching analysis).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_csv: Option<String>,
    /// Beta sweep CSV (beta, is_spr, min_phase_margin).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_csv: Option<String>,
    /// Trajectory CSV, or the prefix for portrait batches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<String>,
    /// Verdict report JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_json: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingAnalysisConfig {
    pub modes: Vec<Vec<Vec<f64>>>,
    pub alpha: f64,
    #[serde(default)]
    pub grid: GridSpec,
    /// Also run the common-certificate search and require it to succeed.
    #[serde(default)]
    pub certify: bool,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl SwitchingAnalysisConfig {
    pub fn system(&self) -> anyhow::Result<SwitchedSystem> {
        Ok(SwitchedSystem::new(parse_modes(&self.modes)?, self.alpha)?)
    }
}

fn default_p_r() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResetAnalysisConfig {
    pub system: ResetLoopSpec,
    pub beta: f64,
    #[serde(default = "default_p_r")]
    pub p_r: f64,
    #[serde(default)]
    pub grid: GridSpec,
    /// Also construct and verify a Lyapunov-like certificate matching the
    /// structural row pattern.
    #[serde(default)]
    pub certify: bool,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn default_beta_lo() -> f64 {
    -5.0
}
fn default_beta_hi() -> f64 {
    5.0
}
fn default_beta_step() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaSweepConfig {
    pub system: ResetLoopSpec,
    #[serde(default = "default_beta_lo")]
    pub beta_lo: f64,
    #[serde(default = "default_beta_hi")]
    pub beta_hi: f64,
    #[serde(default = "default_beta_step")]
    pub step: f64,
    #[serde(default = "default_p_r")]
    pub p_r: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSwitchedConfig {
    pub modes: Vec<Vec<Vec<f64>>>,
    pub alpha: f64,
    pub rule: RuleSpec,
    /// Single initial condition...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// ...or a phase-portrait batch of them (one trajectory each).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_conditions: Option<Vec<Vec<f64>>>,
    pub h: f64,
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_window: Option<usize>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl SimulateSwitchedConfig {
    pub fn system(&self) -> anyhow::Result<SwitchedSystem> {
        Ok(SwitchedSystem::new(parse_modes(&self.modes)?, self.alpha)?)
    }

    pub fn initial_states(&self) -> anyhow::Result<Vec<DVector<f64>>> {
        match (&self.x0, &self.initial_conditions) {
            (Some(x0), None) => Ok(vec![DVector::from_vec(x0.clone())]),
            (None, Some(batch)) if !batch.is_empty() => {
                Ok(batch.iter().map(|x| DVector::from_vec(x.clone())).collect())
            }
            (None, Some(_)) => Err(anyhow!("initial_conditions must not be empty")),
            (Some(_), Some(_)) => Err(anyhow!("give either x0 or initial_conditions, not both")),
            (None, None) => Err(anyhow!(
                "missing initial condition (x0 or initial_conditions)"
            )),
        }
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            memory_window: self.memory_window,
            ..SimOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateResetConfig {
    pub system: ResetLoopSpec,
    /// Initial state; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub h: f64,
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_window: Option<usize>,
    #[serde(default)]
    pub reset_memory: ResetMemorySpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl SimulateResetConfig {
    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            memory_window: self.memory_window,
            reset_memory: self.reset_memory.into(),
        }
    }
}

/// The five experiment kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExperimentConfig {
    SwitchingAnalysis(SwitchingAnalysisConfig),
    ResetAnalysis(ResetAnalysisConfig),
    BetaSweep(BetaSweepConfig),
    SimulateSwitched(SimulateSwitchedConfig),
    SimulateReset(SimulateResetConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::SwitchingAnalysis(_) => "switching-analysis",
            ExperimentConfig::ResetAnalysis(_) => "reset-analysis",
            ExperimentConfig::BetaSweep(_) => "beta-sweep",
            ExperimentConfig::SimulateSwitched(_) => "simulate-switched",
            ExperimentConfig::SimulateReset(_) => "simulate-reset",
        }
    }

    /// Serializes with the `kind` tag reattached.
    pub fn to_tagged_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("config serialization is infallible");
        value
            .as_object_mut()
            .expect("configs are JSON objects")
            .insert("kind".into(), serde_json::Value::String(self.kind().into()));
        value
    }
}

/// Parses a config document: the `kind` tag picks the body schema, and
/// unknown fields anywhere are rejected.
pub fn parse_config(text: &str) -> anyhow::Result<ExperimentConfig> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).context("config is not valid JSON")?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| anyhow!("config must be a JSON object"))?;
    let kind = obj
        .remove("kind")
        .ok_or_else(|| anyhow!("config is missing the \"kind\" field"))?;
    let kind = kind
        .as_str()
        .ok_or_else(|| anyhow!("\"kind\" must be a string"))?
        .to_owned();
    let body = serde_json::Value::Object(obj.clone());
    let parsed = match kind.as_str() {
        "switching-analysis" => ExperimentConfig::SwitchingAnalysis(
            serde_json::from_value(body).context("invalid switching-analysis config")?,
        ),
        "reset-analysis" => ExperimentConfig::ResetAnalysis(
            serde_json::from_value(body).context("invalid reset-analysis config")?,
        ),
        "beta-sweep" => ExperimentConfig::BetaSweep(
            serde_json::from_value(body).context("invalid beta-sweep config")?,
        ),
        "simulate-switched" => ExperimentConfig::SimulateSwitched(
            serde_json::from_value(body).context("invalid simulate-switched config")?,
        ),
        "simulate-reset" => ExperimentConfig::SimulateReset(
            serde_json::from_value(body).context("invalid simulate-reset config")?,
        ),
        other => bail!(
            "unknown kind {other:?}; expected one of switching-analysis, reset-analysis, \
             beta-sweep, simulate-switched, simulate-reset"
        ),
    };
    Ok(parsed)
}

pub fn load_config(path: &std::path::Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}
