//! CSV writers: comma-separated, one header row, 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use fohs_core::sim::{EventKind, Trajectory};
use fohs_core::switching::PhaseSweepResult;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Columns: omega, arg1, arg2, absdiff.
pub fn sweep_csv(sweep: &PhaseSweepResult) -> String {
    let mut out = String::from("omega,arg1,arg2,absdiff\n");
    for k in 0..sweep.omegas.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt(sweep.omegas[k]),
            fmt(sweep.arg1[k]),
            fmt(sweep.arg2[k]),
            fmt(sweep.diffs[k]),
        );
    }
    out
}

/// Columns: beta, is_spr, min_phase_margin.
pub fn beta_csv(rows: &[(f64, bool, f64)]) -> String {
    let mut out = String::from("beta,is_spr,min_phase_margin\n");
    for (beta, is_spr, margin) in rows {
        let _ = writeln!(out, "{},{},{}", fmt(*beta), *is_spr as u8, fmt(*margin));
    }
    out
}

/// Columns: t, x1..xn, y, active_mode, event.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, |x| x.len());
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    out.push_str(",y,active_mode,event\n");

    // Mark the sample at which each event takes effect.
    let mut labels = vec![""; traj.times.len()];
    for ev in &traj.events {
        let label = match ev.kind {
            EventKind::Switch => "switch",
            EventKind::Reset => "reset",
        };
        let h = if traj.times.len() > 1 {
            traj.times[1] - traj.times[0]
        } else {
            1.0
        };
        let idx = (ev.time / h).round() as usize;
        if idx < labels.len() {
            labels[idx] = label;
        }
    }

    for (k, label) in labels.iter().enumerate() {
        let _ = write!(out, "{}", fmt(traj.times[k]));
        for i in 0..n {
            let _ = write!(out, ",{}", fmt(traj.states[k][i]));
        }
        let _ = writeln!(
            out,
            ",{},{},{label}",
            fmt(traj.outputs[k]),
            traj.active_modes[k],
        );
    }
    out
}

/// Index file for a phase-portrait batch: one row per trajectory CSV.
pub fn portrait_index_csv(rows: &[(String, &[f64], u64, f64)]) -> String {
    let n = rows.first().map_or(0, |(_, x0, _, _)| x0.len());
    let mut out = String::from("file");
    for i in 1..=n {
        let _ = write!(out, ",x0_{i}");
    }
    out.push_str(",seed,final_norm\n");
    for (file, x0, seed, final_norm) in rows {
        let _ = write!(out, "{file}");
        for v in x0.iter() {
            let _ = write!(out, ",{}", fmt(*v));
        }
        let _ = writeln!(out, ",{seed},{}", fmt(*final_norm));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt(core::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        // 1 leading + 16 fractional digits.
        let digits: usize = s
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(|c| c.is_ascii_digit())
            .count();
        assert_eq!(digits, 17);
    }

    #[test]
    fn beta_csv_shape() {
        let csv = beta_csv(&[(0.5, true, 0.1), (2.0, false, -0.2)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "beta,is_spr,min_phase_margin");
        assert!(lines.next().unwrap().contains(",1,"));
        assert!(lines.next().unwrap().contains(",0,"));
    }
}
