use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fohs_cli::config::{load_config, ExperimentConfig, GridSpec};
use fohs_cli::run::{execute, resolve, RunOverrides};

/// Stability certification and simulation for fractional-order switching
/// and reset control systems.
#[derive(Parser)]
#[command(name = "fohs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise phase sweeps, per-mode margins and the switched-system
    /// verdict (config kind: switching-analysis).
    AnalyzeSwitching(CommonArgs),
    /// SPR phase check of the H-beta transfer for one beta (config kind:
    /// reset-analysis).
    AnalyzeReset(CommonArgs),
    /// Scan and bisect the beta intervals passing the SPR check (config
    /// kind: beta-sweep).
    BetaSweep(CommonArgs),
    /// Trajectory simulation (config kinds: simulate-switched,
    /// simulate-reset).
    Simulate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the report and CSV artifacts (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Frequency grid override: "omega_min,omega_max,points".
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Seed override for seeded switching rules.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress stdout; the exit code carries the verdict.
    #[arg(long)]
    quiet: bool,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected omega_min,omega_max,points".into());
    }
    let omega_min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("omega_min: {e}"))?;
    let omega_max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("omega_max: {e}"))?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| format!("points: {e}"))?;
    Ok(GridSpec {
        omega_min,
        omega_max,
        points,
    })
}

fn accepted_kinds(cmd: &Command) -> &'static [&'static str] {
    match cmd {
        Command::AnalyzeSwitching(_) => &["switching-analysis"],
        Command::AnalyzeReset(_) => &["reset-analysis"],
        Command::BetaSweep(_) => &["beta-sweep"],
        Command::Simulate(_) => &["simulate-switched", "simulate-reset"],
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::AnalyzeSwitching(a)
        | Command::AnalyzeReset(a)
        | Command::BetaSweep(a)
        | Command::Simulate(a) => a,
    };

    match run(&cli.command, args) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            // Diagnostics go to stderr even in quiet mode; only the
            // verdict channel (stdout + exit code) is silenced.
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: &Command, args: &CommonArgs) -> anyhow::Result<u8> {
    let config = load_config(&args.config)?;
    let kinds = accepted_kinds(cmd);
    if !kinds.contains(&config.kind()) {
        anyhow::bail!(
            "config kind {:?} does not match this subcommand (expected {})",
            config.kind(),
            kinds.join(" or ")
        );
    }
    let resolved: ExperimentConfig = resolve(
        config,
        &RunOverrides {
            grid: args.grid,
            seed: args.seed,
        },
    );
    let report = execute(&resolved, args.out.as_deref())?;
    if !args.quiet {
        println!("{}", report.to_json_pretty());
    }
    Ok(u8::try_from(report.exit_code).unwrap_or(1))
}
