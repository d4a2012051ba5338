//! Command runners: resolve overrides into the config, execute the
//! library operations, emit CSV artifacts and assemble the verdict
//! report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use fohs_core::nalgebra::DMatrix;

use fohs_core::reset::{
    beta_range_search, find_reset_certificate, spr_phase_check, verify_reset_certificate,
    HBetaSweeper,
};
use fohs_core::sim::{simulate_reset, simulate_switched, EventKind, Trajectory};
use fohs_core::switching::{switching_stability_verdict, SwitchingVerdict};

use crate::config::{
    BetaSweepConfig, ExperimentConfig, GridSpec, ResetAnalysisConfig, SimulateResetConfig,
    SimulateSwitchedConfig, SwitchingAnalysisConfig,
};
use crate::csvio;
use crate::report::{
    BetaIntervalEvidence, CertificateEvidence, EventCounts, Evidence, PairSweepEvidence,
    ResetCertificateEvidence, TrajectorySummary, VerdictReport,
};

/// Command-line overrides folded into the config before execution, so the
/// report's config echo is self-contained.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
}

/// Applies overrides, returning the resolved config that the report
/// echoes.
pub fn resolve(config: ExperimentConfig, overrides: &RunOverrides) -> ExperimentConfig {
    let mut config = config;
    match &mut config {
        ExperimentConfig::SwitchingAnalysis(c) => {
            if let Some(g) = overrides.grid {
                c.grid = g;
            }
        }
        ExperimentConfig::ResetAnalysis(c) => {
            if let Some(g) = overrides.grid {
                c.grid = g;
            }
        }
        ExperimentConfig::BetaSweep(c) => {
            if let Some(g) = overrides.grid {
                c.grid = g;
            }
        }
        ExperimentConfig::SimulateSwitched(c) => {
            c.rule = c.rule.with_seed(overrides.seed);
        }
        ExperimentConfig::SimulateReset(_) => {}
    }
    config
}

/// Number of worker threads for trajectory batches: `FOHS_THREADS` caps
/// the machine default.
pub fn thread_budget() -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("FOHS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => n.min(hw.max(1)),
        _ => hw,
    }
}

struct ArtifactSink<'a> {
    out_dir: Option<&'a Path>,
    written: Vec<String>,
}

impl<'a> ArtifactSink<'a> {
    fn new(out_dir: Option<&'a Path>) -> Self {
        Self {
            out_dir,
            written: Vec::new(),
        }
    }

    /// Writes `contents` under the output directory (when one is set) and
    /// records the artifact name.
    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        if let Some(dir) = self.out_dir {
            let path: PathBuf = dir.join(name);
            csvio::write_file(&path, contents)
                .with_context(|| format!("writing {}", path.display()))?;
            self.written.push(name.to_owned());
        }
        Ok(())
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn finish(
    kind: &str,
    verdict: &str,
    exit_code: i32,
    config: serde_json::Value,
    evidence: Evidence,
    artifacts: Vec<String>,
    started: Instant,
) -> VerdictReport {
    VerdictReport {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        kind: kind.to_owned(),
        verdict: verdict.to_owned(),
        exit_code,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config,
        evidence,
        artifacts,
    }
}

/// Inserts `_i_j` before the extension for multi-pair sweeps.
fn pair_file_name(base: &str, i: usize, j: usize, multiple: bool) -> String {
    if !multiple {
        return base.to_owned();
    }
    match base.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}_{i}_{j}.{ext}"),
        None => format!("{base}_{i}_{j}"),
    }
}

pub fn run_switching_analysis(
    cfg: &SwitchingAnalysisConfig,
    echo: serde_json::Value,
    out_dir: Option<&Path>,
) -> anyhow::Result<VerdictReport> {
    let started = Instant::now();
    let sys = cfg.system()?;
    let grid = cfg.grid.to_grid()?;
    let record = switching_stability_verdict(&sys, &grid, cfg.certify)?;

    let mut sink = ArtifactSink::new(out_dir);
    let sweep_base = cfg
        .outputs
        .sweep_csv
        .clone()
        .unwrap_or_else(|| "sweep.csv".into());
    let multiple = record.pair_sweeps.len() > 1;
    for (i, j, sweep) in &record.pair_sweeps {
        sink.write(
            &pair_file_name(&sweep_base, *i, *j, multiple),
            &csvio::sweep_csv(sweep),
        )?;
    }

    let (verdict, exit_code) = match record.verdict {
        SwitchingVerdict::QuadraticallyStable => ("quadratically-stable", 0),
        SwitchingVerdict::Inconclusive => ("inconclusive", 2),
        SwitchingVerdict::SubsystemUnstable(_) => ("subsystem-unstable", 3),
    };
    let evidence = Evidence::Switching {
        mode_margins: record.mode_margins.clone(),
        pair_sweeps: record
            .pair_sweeps
            .iter()
            .map(|(i, j, s)| PairSweepEvidence {
                mode_i: *i,
                mode_j: *j,
                max_diff: s.max_diff,
                argmax_omega: s.argmax_omega,
                verdict_threshold: s.verdict_threshold,
            })
            .collect(),
        certificate: record.certificate.as_ref().map(|c| CertificateEvidence {
            p_matrix: matrix_rows(&c.p_matrix),
            margins: c.margins.clone(),
            p_min_eig: c.p_min_eig,
        }),
    };
    let mut report = finish(
        "switching-analysis",
        verdict,
        exit_code,
        echo,
        evidence,
        sink.written,
        started,
    );
    write_report(&mut report, cfg.outputs.report_json.as_deref(), out_dir)?;
    Ok(report)
}

pub fn run_reset_analysis(
    cfg: &ResetAnalysisConfig,
    echo: serde_json::Value,
    out_dir: Option<&Path>,
) -> anyhow::Result<VerdictReport> {
    let started = Instant::now();
    let sys = cfg.system.build()?;
    let grid = cfg.grid.to_grid()?;
    let result = spr_phase_check(&sys, cfg.beta, cfg.p_r, &grid)?;

    let mut sink = ArtifactSink::new(out_dir);
    if sink.out_dir.is_some() {
        // Phase curve of H_beta along the grid.
        let sweeper = HBetaSweeper::new(&sys, cfg.p_r, &grid)?;
        let omegas = grid.omegas();
        let mut csv = String::from("omega,arg_hbeta\n");
        for (w, arg) in omegas.iter().zip(sweeper.phase_curve(cfg.beta)) {
            csv.push_str(&format!("{w:.16e},{arg:.16e}\n"));
        }
        let name = cfg
            .outputs
            .sweep_csv
            .clone()
            .unwrap_or_else(|| "hbeta_phase.csv".into());
        sink.write(&name, &csv)?;
    }

    let certificate = if cfg.certify && result.is_spr {
        match find_reset_certificate(&sys, cfg.beta, cfg.p_r, 2000)? {
            Some(p) => {
                let check = verify_reset_certificate(&sys, &p)?;
                Some(ResetCertificateEvidence {
                    p_matrix: matrix_rows(&p),
                    flow_margin: check.flow_margin,
                    jump_margin: check.jump_margin,
                    p_min_eig: check.p_min_eig,
                    hbeta_pattern: check.hbeta_pattern,
                })
            }
            None => None,
        }
    } else {
        None
    };

    let (verdict, exit_code) = if result.is_spr {
        ("spr-certified", 0)
    } else {
        ("not-spr-certified", 2)
    };
    let evidence = Evidence::Reset {
        beta: cfg.beta,
        p_r: cfg.p_r,
        hurwitz: result.hurwitz,
        is_spr: result.is_spr,
        min_phase_margin: result.min_phase_margin,
        low_order_caveat: result.low_order_caveat,
        certificate,
    };
    let mut report = finish(
        "reset-analysis",
        verdict,
        exit_code,
        echo,
        evidence,
        sink.written,
        started,
    );
    write_report(&mut report, cfg.outputs.report_json.as_deref(), out_dir)?;
    Ok(report)
}

pub fn run_beta_sweep(
    cfg: &BetaSweepConfig,
    echo: serde_json::Value,
    out_dir: Option<&Path>,
) -> anyhow::Result<VerdictReport> {
    let started = Instant::now();
    let sys = cfg.system.build()?;
    let grid = cfg.grid.to_grid()?;
    let intervals = beta_range_search(&sys, cfg.p_r, cfg.beta_lo, cfg.beta_hi, cfg.step, &grid)?;

    let mut sink = ArtifactSink::new(out_dir);
    let sweeper = HBetaSweeper::new(&sys, cfg.p_r, &grid)?;
    let mut rows = Vec::new();
    let count = ((cfg.beta_hi - cfg.beta_lo) / cfg.step) as usize + 1;
    let mut caveat = false;
    for k in 0..=count {
        let beta = (cfg.beta_lo + k as f64 * cfg.step).min(cfg.beta_hi);
        let res = sweeper.check(beta);
        caveat = res.low_order_caveat;
        rows.push((beta, res.is_spr, res.min_phase_margin));
    }
    let name = cfg
        .outputs
        .beta_csv
        .clone()
        .unwrap_or_else(|| "beta_sweep.csv".into());
    sink.write(&name, &csvio::beta_csv(&rows))?;

    let (verdict, exit_code) = if intervals.is_empty() {
        ("no-intervals", 2)
    } else {
        ("intervals-found", 0)
    };
    let evidence = Evidence::BetaSweep {
        intervals: intervals
            .iter()
            .map(|iv| BetaIntervalEvidence {
                lo: iv.lo,
                hi: iv.hi,
                endpoint_width: iv.endpoint_width,
            })
            .collect(),
        // Hurwitz status is beta-independent.
        hurwitz: sweeper.check(cfg.beta_lo).hurwitz,
        low_order_caveat: caveat,
    };
    let mut report = finish(
        "beta-sweep",
        verdict,
        exit_code,
        echo,
        evidence,
        sink.written,
        started,
    );
    write_report(&mut report, cfg.outputs.report_json.as_deref(), out_dir)?;
    Ok(report)
}

fn summarize(traj: &Trajectory) -> TrajectorySummary {
    TrajectorySummary {
        steps: traj.times.len() - 1,
        final_state: traj.final_state().iter().copied().collect(),
        final_output: *traj.outputs.last().unwrap(),
        final_norm: traj.final_state().norm(),
        events: EventCounts {
            switches: traj
                .events
                .iter()
                .filter(|e| e.kind == EventKind::Switch)
                .count(),
            resets: traj
                .events
                .iter()
                .filter(|e| e.kind == EventKind::Reset)
                .count(),
        },
    }
}

pub fn run_simulate_switched(
    cfg: &SimulateSwitchedConfig,
    echo: serde_json::Value,
    out_dir: Option<&Path>,
) -> anyhow::Result<VerdictReport> {
    let started = Instant::now();
    let sys = cfg.system()?;
    let initial = cfg.initial_states()?;
    let opts = cfg.sim_options();
    let batch = initial.len() > 1;

    // Each batch member gets its own derived seed so trajectories stay
    // independent of scheduling.
    let base_rule = cfg.rule.to_rule(None);
    let rule_for = |idx: usize| -> fohs_core::sim::SwitchingRule {
        use fohs_core::sim::SwitchingRule as R;
        match &base_rule {
            R::ArbitrarySeeded { seed } => R::ArbitrarySeeded {
                seed: seed.wrapping_add(idx as u64),
            },
            R::StateRegions { normal, band, seed } => R::StateRegions {
                normal: normal.clone(),
                band: *band,
                seed: seed.wrapping_add(idx as u64),
            },
        }
    };

    // Trajectories run in waves of at most `thread_budget` workers; the
    // outputs are identical for any budget since each index has its own
    // derived seed.
    let workers = thread_budget().min(initial.len()).max(1);
    let mut results: Vec<fohs_core::Result<Trajectory>> = Vec::with_capacity(initial.len());
    let indices: Vec<usize> = (0..initial.len()).collect();
    for wave in indices.chunks(workers) {
        let mut wave_results = std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|&idx| {
                    let sys = &sys;
                    let x0 = &initial[idx];
                    let opts = &opts;
                    let rule = rule_for(idx);
                    scope.spawn(move || simulate_switched(sys, &rule, x0, cfg.h, cfg.t_final, opts))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation worker panicked"))
                .collect::<Vec<_>>()
        });
        results.append(&mut wave_results);
    }

    let mut sink = ArtifactSink::new(out_dir);
    let mut summaries = Vec::new();
    let mut index_rows: Vec<(String, Vec<f64>, u64, f64)> = Vec::new();
    for (idx, slot) in results.into_iter().enumerate() {
        let traj = slot?;
        let name = if batch {
            let base = cfg
                .outputs
                .trajectory_csv
                .clone()
                .unwrap_or_else(|| "portrait.csv".into());
            match base.rsplit_once('.') {
                Some((stem, ext)) => format!("{stem}_{idx:02}.{ext}"),
                None => format!("{base}_{idx:02}"),
            }
        } else {
            cfg.outputs
                .trajectory_csv
                .clone()
                .unwrap_or_else(|| "trajectory.csv".into())
        };
        sink.write(&name, &csvio::trajectory_csv(&traj))?;
        let seed = match rule_for(idx) {
            fohs_core::sim::SwitchingRule::ArbitrarySeeded { seed } => seed,
            fohs_core::sim::SwitchingRule::StateRegions { seed, .. } => seed,
        };
        index_rows.push((
            name,
            initial[idx].iter().copied().collect(),
            seed,
            traj.final_state().norm(),
        ));
        summaries.push(summarize(&traj));
    }
    if batch {
        let rows: Vec<(String, &[f64], u64, f64)> = index_rows
            .iter()
            .map(|(f, x0, s, n)| (f.clone(), x0.as_slice(), *s, *n))
            .collect();
        sink.write("portrait_index.csv", &csvio::portrait_index_csv(&rows))?;
    }

    let mut report = finish(
        "simulate-switched",
        "simulated",
        0,
        echo,
        Evidence::Simulation {
            scheme_notes: vec![
                "explicit Grünwald-Letnikov scheme; constant initial state incorporated \
                 Caputo-style (the deviation from x0 is simulated)"
                    .into(),
                match cfg.memory_window {
                    Some(w) => format!("memory window: last {w} steps"),
                    None => "memory window: full history".into(),
                },
            ],
            trajectories: summaries,
        },
        sink.written,
        started,
    );
    write_report(&mut report, cfg.outputs.report_json.as_deref(), out_dir)?;
    Ok(report)
}

pub fn run_simulate_reset(
    cfg: &SimulateResetConfig,
    echo: serde_json::Value,
    out_dir: Option<&Path>,
) -> anyhow::Result<VerdictReport> {
    let started = Instant::now();
    let sys = cfg.system.build()?;
    let x0 = match &cfg.x0 {
        Some(v) => fohs_core::nalgebra::DVector::from_vec(v.clone()),
        None => fohs_core::nalgebra::DVector::zeros(sys.dim()),
    };
    let traj = simulate_reset(&sys, &x0, cfg.h, cfg.t_final, &cfg.sim_options())?;

    let mut sink = ArtifactSink::new(out_dir);
    let name = cfg
        .outputs
        .trajectory_csv
        .clone()
        .unwrap_or_else(|| "trajectory.csv".into());
    sink.write(&name, &csvio::trajectory_csv(&traj))?;

    let mut report = finish(
        "simulate-reset",
        "simulated",
        0,
        echo,
        Evidence::Simulation {
            scheme_notes: vec![
                "explicit Grünwald-Letnikov scheme; constant initial state incorporated \
                 Caputo-style (the deviation from x0 is simulated)"
                    .into(),
                format!(
                    "reset-state fractional memory: {}",
                    match cfg.reset_memory {
                        crate::config::ResetMemorySpec::ClearResetStates =>
                            "cleared at each jump (reset states restart their memory)",
                        crate::config::ResetMemorySpec::Retain => "retained across jumps",
                    }
                ),
                match cfg.memory_window {
                    Some(w) => format!("memory window: last {w} steps"),
                    None => "memory window: full history".into(),
                },
            ],
            trajectories: vec![summarize(&traj)],
        },
        sink.written,
        started,
    );
    write_report(&mut report, cfg.outputs.report_json.as_deref(), out_dir)?;
    Ok(report)
}

fn write_report(
    report: &mut VerdictReport,
    name: Option<&str>,
    out_dir: Option<&Path>,
) -> anyhow::Result<()> {
    if let Some(dir) = out_dir {
        let name = name.unwrap_or("report.json");
        report.artifacts.push(name.to_owned());
        let path = dir.join(name);
        csvio::write_file(&path, &report.to_json_pretty())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Executes a resolved config and returns its report.
pub fn execute(config: &ExperimentConfig, out_dir: Option<&Path>) -> anyhow::Result<VerdictReport> {
    let echo = config.to_tagged_json();
    match config {
        ExperimentConfig::SwitchingAnalysis(c) => run_switching_analysis(c, echo, out_dir),
        ExperimentConfig::ResetAnalysis(c) => run_reset_analysis(c, echo, out_dir),
        ExperimentConfig::BetaSweep(c) => run_beta_sweep(c, echo, out_dir),
        ExperimentConfig::SimulateSwitched(c) => run_simulate_switched(c, echo, out_dir),
        ExperimentConfig::SimulateReset(c) => run_simulate_reset(c, echo, out_dir),
    }
}
