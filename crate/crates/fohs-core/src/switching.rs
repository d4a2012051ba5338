//! Frequency-domain stability tests for fractional-order switched systems.
//!
//! For orders at or below one the test object is `arg det(M - j w I)` with
//! `M` the transformed mode matrix (at order one, `M = A` and this is the
//! ordinary characteristic-polynomial phase). For orders in `(1, 2)` it is
//! `arg det((A^2 - w^2 I) - 2 j w sin(phi) A)`, `phi = alpha pi / 2`.
//! Pairwise phase-difference maxima below `pi/2` correspond to the
//! existence of a common quadratic certificate; maxima at or above the
//! threshold leave the verdict inconclusive, never "unstable".

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::lmi::{find_common_p, LyapunovCertificate, SearchOutcome, SwitchedSystem};
use crate::matfrac::{complexify, curly_a, folti_stability_margin, FoLtiSystem};
use crate::math;
use crate::{Error, Result};

/// Half-width of the indeterminacy band around `pi/2`: grid maxima are
/// lower bounds of the true supremum, so near-threshold sweeps must not
/// certify stability.
pub const INDETERMINACY_BAND: f64 = 0.02;

/// Logarithmically spaced frequency grid in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    omega_min: f64,
    omega_max: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, points: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) {
            return Err(Error::Invalid(
                "frequency grid needs 0 < omega_min < omega_max".into(),
            ));
        }
        if points < 2 {
            return Err(Error::Invalid(
                "frequency grid needs at least 2 points".into(),
            ));
        }
        Ok(Self {
            omega_min,
            omega_max,
            points,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// The grid values, log-spaced inclusive of both endpoints.
    pub fn omegas(&self) -> Vec<f64> {
        let lo = math::log10(self.omega_min);
        let hi = math::log10(self.omega_max);
        let n = self.points;
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                math::powf(10.0, lo + t * (hi - lo))
            })
            .collect()
    }
}

impl Default for FrequencyGrid {
    /// `[1e-4, 1e4]` rad/s with 2000 points: resolves the phase variation
    /// of all desk-scale examples below 0.01 rad between samples.
    fn default() -> Self {
        Self {
            omega_min: 1e-4,
            omega_max: 1e4,
            points: 2000,
        }
    }
}

/// Pairwise phase-difference sweep output.
#[derive(Debug, Clone)]
pub struct PhaseSweepResult {
    pub omegas: Vec<f64>,
    /// Unwrapped phase curve of the first mode.
    pub arg1: Vec<f64>,
    /// Unwrapped phase curve of the second mode.
    pub arg2: Vec<f64>,
    /// Pointwise `|arg1 - arg2|`.
    pub diffs: Vec<f64>,
    pub max_diff: f64,
    /// Frequency at which `max_diff` is attained.
    pub argmax_omega: f64,
    /// Always `pi/2`.
    pub verdict_threshold: f64,
}

enum PhaseEvaluator {
    /// `det(M - j w I)`, `M = curly_a(A)`.
    Low { m: DMatrix<Complex64> },
    /// `det((A^2 - w^2 I) - 2 j w sin(phi) A)`.
    High {
        a: DMatrix<Complex64>,
        a_sq: DMatrix<Complex64>,
        sin_phi: f64,
    },
}

impl PhaseEvaluator {
    fn new(a: &DMatrix<f64>, alpha: f64) -> Result<Self> {
        if alpha <= 1.0 {
            let m = curly_a(&FoLtiSystem::new(a.clone(), alpha)?)?;
            Ok(PhaseEvaluator::Low { m: complexify(&m) })
        } else if alpha < 2.0 {
            let ac = complexify(a);
            let a_sq = &ac * &ac;
            Ok(PhaseEvaluator::High {
                a: ac,
                a_sq,
                sin_phi: math::sin(alpha * core::f64::consts::PI / 2.0),
            })
        } else {
            Err(Error::OrderOutOfRange {
                alpha,
                range: "(0, 2)",
            })
        }
    }

    /// Principal argument of the determinant at one frequency.
    fn principal_arg(&self, omega: f64) -> f64 {
        let det = match self {
            PhaseEvaluator::Low { m } => {
                let n = m.nrows();
                let mut shifted = m.clone();
                for d in 0..n {
                    shifted[(d, d)] -= Complex64::new(0.0, omega);
                }
                shifted.lu().determinant()
            }
            PhaseEvaluator::High { a, a_sq, sin_phi } => {
                let n = a.nrows();
                let scale = Complex64::new(0.0, -2.0 * omega * sin_phi);
                let mut m = a_sq + a * scale;
                for d in 0..n {
                    m[(d, d)] -= Complex64::new(omega * omega, 0.0);
                }
                m.lu().determinant()
            }
        };
        math::atan2(det.im, det.re)
    }

    /// Unwrapped phase along an ascending grid, anchored at the principal
    /// value of the first sample. Each sample is shifted by the multiple
    /// of 2 pi that keeps consecutive values within pi of each other.
    fn curve(&self, omegas: &[f64]) -> Vec<f64> {
        let two_pi = 2.0 * core::f64::consts::PI;
        let mut out = Vec::with_capacity(omegas.len());
        let mut prev = 0.0;
        for (k, &w) in omegas.iter().enumerate() {
            let principal = self.principal_arg(w);
            let value = if k == 0 {
                principal
            } else {
                principal + two_pi * math::round((prev - principal) / two_pi)
            };
            out.push(value);
            prev = value;
        }
        out
    }
}

/// Principal-value phase of `det(curly_a(A) - j w I)` at a single
/// frequency, for orders in `(0, 1]`. Sweeps unwrap this along the grid.
pub fn phase_of_det_low(a: &DMatrix<f64>, alpha: f64, omega: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OrderOutOfRange {
            alpha,
            range: "(0, 1]",
        });
    }
    Ok(PhaseEvaluator::new(a, alpha)?.principal_arg(omega))
}

/// Principal-value phase of `det((A^2 - w^2 I) - 2 j w sin(phi) A)` at a
/// single frequency, for orders in `[1, 2)`.
pub fn phase_of_det_high(a: &DMatrix<f64>, alpha: f64, omega: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::OrderOutOfRange {
            alpha,
            range: "[1, 2)",
        });
    }
    let ac = complexify(a);
    let a_sq = &ac * &ac;
    let eval = PhaseEvaluator::High {
        a: ac,
        a_sq,
        sin_phi: math::sin(alpha * core::f64::consts::PI / 2.0),
    };
    Ok(eval.principal_arg(omega))
}

/// Unwrapped phase curve of one mode over a grid (order-appropriate
/// determinant formula).
pub fn phase_curve(a: &DMatrix<f64>, alpha: f64, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    Ok(PhaseEvaluator::new(a, alpha)?.curve(&grid.omegas()))
}

/// Pairwise phase-difference sweep between two individually stable modes.
pub fn phase_difference_sweep(
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    alpha: f64,
    grid: &FrequencyGrid,
) -> Result<PhaseSweepResult> {
    if a1.nrows() != a2.nrows() || a1.ncols() != a2.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a1.nrows(),
            found: a2.nrows(),
        });
    }
    for (index, a) in [a1, a2].into_iter().enumerate() {
        let margin = folti_stability_margin(&FoLtiSystem::new(a.clone(), alpha)?)?;
        if margin <= 0.0 {
            return Err(Error::SubsystemUnstable { index, margin });
        }
    }
    let omegas = grid.omegas();
    let c1 = PhaseEvaluator::new(a1, alpha)?.curve(&omegas);
    let c2 = PhaseEvaluator::new(a2, alpha)?.curve(&omegas);
    let diffs: Vec<f64> = c1.iter().zip(&c2).map(|(x, y)| (x - y).abs()).collect();
    let (mut max_diff, mut argmax) = (0.0, omegas[0]);
    for (k, &d) in diffs.iter().enumerate() {
        if d > max_diff {
            max_diff = d;
            argmax = omegas[k];
        }
    }
    Ok(PhaseSweepResult {
        omegas,
        arg1: c1,
        arg2: c2,
        diffs,
        max_diff,
        argmax_omega: argmax,
        verdict_threshold: core::f64::consts::FRAC_PI_2,
    })
}

/// Overall verdict for a switched system.
#[derive(Debug, Clone, PartialEq)]
pub enum SwitchingVerdict {
    /// Every pairwise sweep stays below `pi/2` minus the band (and the
    /// certificate search succeeded, when requested).
    QuadraticallyStable,
    /// Some pair exceeds the threshold or sits inside the band, or a
    /// requested certificate could not be found. Not an instability claim.
    Inconclusive,
    /// The indexed mode fails its own stability test.
    SubsystemUnstable(usize),
}

/// Evidence record returned by [`switching_stability_verdict`].
#[derive(Debug, Clone)]
pub struct VerdictRecord {
    pub verdict: SwitchingVerdict,
    /// Per-mode eigenvalue-argument stability margins.
    pub mode_margins: Vec<f64>,
    /// One sweep per unordered mode pair `(i, j)`.
    pub pair_sweeps: Vec<(usize, usize, PhaseSweepResult)>,
    /// Present when certification was requested and succeeded.
    pub certificate: Option<LyapunovCertificate>,
}

/// Runs the per-mode margin checks, all pairwise sweeps, and (optionally)
/// the common-certificate search.
///
/// `QuadraticallyStable` needs every pairwise maximum strictly below
/// `pi/2 - `[`INDETERMINACY_BAND`], and a verified certificate when
/// `certify` is set. Anything else that is not an outright subsystem
/// failure is `Inconclusive`.
pub fn switching_stability_verdict(
    sys: &SwitchedSystem,
    grid: &FrequencyGrid,
    certify: bool,
) -> Result<VerdictRecord> {
    let mut mode_margins = Vec::with_capacity(sys.modes().len());
    for i in 0..sys.modes().len() {
        mode_margins.push(folti_stability_margin(&sys.mode_system(i))?);
    }
    if let Some(bad) = mode_margins.iter().position(|&m| m <= 0.0) {
        return Ok(VerdictRecord {
            verdict: SwitchingVerdict::SubsystemUnstable(bad),
            mode_margins,
            pair_sweeps: Vec::new(),
            certificate: None,
        });
    }

    let mut pair_sweeps = Vec::new();
    let mut phase_ok = true;
    for i in 0..sys.modes().len() {
        for j in (i + 1)..sys.modes().len() {
            let sweep =
                phase_difference_sweep(&sys.modes()[i], &sys.modes()[j], sys.alpha(), grid)?;
            if sweep.max_diff >= core::f64::consts::FRAC_PI_2 - INDETERMINACY_BAND {
                phase_ok = false;
            }
            pair_sweeps.push((i, j, sweep));
        }
    }

    let mut certificate = None;
    let mut verdict = if phase_ok {
        SwitchingVerdict::QuadraticallyStable
    } else {
        SwitchingVerdict::Inconclusive
    };
    if certify && phase_ok {
        match find_common_p(sys)? {
            SearchOutcome::Found(cert) => certificate = Some(cert),
            SearchOutcome::NotFound(_) => verdict = SwitchingVerdict::Inconclusive,
        }
    }

    Ok(VerdictRecord {
        verdict,
        mode_margins,
        pair_sweeps,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn example1() -> (DMatrix<f64>, DMatrix<f64>) {
        (m2(-0.1, 0.1, -2.0, -0.1), m2(-0.01, 2.0, -0.1, -0.01))
    }

    fn example2() -> (DMatrix<f64>, DMatrix<f64>) {
        (m2(-0.2, -1.0, 0.01, -0.1), m2(-0.3, 0.01, -1.0, -0.1))
    }

    #[test]
    fn low_phase_at_zero_frequency() {
        let a = -DMatrix::<f64>::identity(2, 2);
        assert_relative_eq!(
            phase_of_det_low(&a, 1.0, 0.0).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn low_phase_scalar_product_of_arguments() {
        // det(-I - jI) = (-1 - j)^2 = 2j: principal value pi/2, which is
        // 2 * (-3 pi / 4) up to one full turn.
        let a = -DMatrix::<f64>::identity(2, 2);
        let p = phase_of_det_low(&a, 1.0, 1.0).unwrap();
        assert_relative_eq!(p, FRAC_PI_2, epsilon = 1e-12);
        let equivalent = 2.0 * (-3.0 * PI / 4.0);
        let turns = (p - equivalent) / (2.0 * PI);
        assert_relative_eq!(turns, math::round(turns), epsilon = 1e-12);
    }

    #[test]
    fn high_phase_scalar_case() {
        let a = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let p = phase_of_det_high(&a, 1.0, 1.0).unwrap();
        assert_relative_eq!(p, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn sweep_identical_modes_is_zero() {
        // Two negative real eigenvalues: stable at every order below two.
        let a = m2(0.0, 1.0, -2.0, -3.0);
        for &alpha in &[0.5, 1.0, 1.3, 1.9] {
            let s = phase_difference_sweep(&a, &a, alpha, &FrequencyGrid::default()).unwrap();
            assert_eq!(s.max_diff, 0.0);
        }
    }

    #[test]
    fn sweep_is_symmetric_in_the_pair() {
        let (a1, a2) = example1();
        let g = FrequencyGrid::new(1e-3, 1e3, 400).unwrap();
        let s12 = phase_difference_sweep(&a1, &a2, 0.6, &g).unwrap();
        let s21 = phase_difference_sweep(&a2, &a1, 0.6, &g).unwrap();
        for (x, y) in s12.diffs.iter().zip(&s21.diffs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_unstable_mode() {
        let stable = m2(-1.0, 0.0, 0.0, -1.0);
        let unstable = m2(1.0, 0.0, 0.0, 1.0);
        match phase_difference_sweep(&stable, &unstable, 0.8, &FrequencyGrid::default()) {
            Err(Error::SubsystemUnstable { index: 1, .. }) => {}
            other => panic!("expected SubsystemUnstable, got {other:?}"),
        }
    }

    #[test]
    fn example1_sweep_values() {
        // The transformed-determinant differences stay below pi/2 at every
        // order here; cross-checked against an independent implementation.
        let (a1, a2) = example1();
        let g = FrequencyGrid::default();
        let md06 = phase_difference_sweep(&a1, &a2, 0.6, &g).unwrap().max_diff;
        assert!((md06 - 0.1394).abs() < 5e-3, "got {md06}");
        let md10 = phase_difference_sweep(&a1, &a2, 1.0, &g).unwrap().max_diff;
        assert!((md10 - 1.0548).abs() < 5e-3, "got {md10}");
        assert!(md06 < FRAC_PI_2 && md10 < FRAC_PI_2);
    }

    #[test]
    fn example2_threshold_crossing() {
        let (a1, a2) = example2();
        let g = FrequencyGrid::default();
        let md164 = phase_difference_sweep(&a1, &a2, 1.64, &g).unwrap().max_diff;
        let md165 = phase_difference_sweep(&a1, &a2, 1.65, &g).unwrap().max_diff;
        assert!(md164 < FRAC_PI_2, "1.64 gave {md164}");
        assert!(md165 > FRAC_PI_2, "1.65 gave {md165}");
    }

    #[test]
    fn consistency_of_formulations_at_alpha_one() {
        // At order one the high-path determinant is the square of the
        // low-path one, so unwrapped differences double exactly.
        let (a1, a2) = example2();
        let g = FrequencyGrid::new(1e-4, 1e4, 1500).unwrap();
        let omegas = g.omegas();
        let low1 = PhaseEvaluator::new(&a1, 1.0).unwrap().curve(&omegas);
        let low2 = PhaseEvaluator::new(&a2, 1.0).unwrap().curve(&omegas);
        let mk_high = |a: &DMatrix<f64>| {
            let ac = complexify(a);
            let a_sq = &ac * &ac;
            PhaseEvaluator::High {
                a: ac,
                a_sq,
                sin_phi: 1.0,
            }
        };
        let high1 = mk_high(&a1).curve(&omegas);
        let high2 = mk_high(&a2).curve(&omegas);
        for k in 0..omegas.len() {
            let low_diff = low1[k] - low2[k];
            let high_diff = high1[k] - high2[k];
            assert!(
                (high_diff - 2.0 * low_diff).abs() < 1e-9,
                "omega = {}: high {high_diff} vs 2 x low {low_diff}",
                omegas[k]
            );
        }
    }

    #[test]
    fn grid_refinement_never_loses_the_maximum() {
        let (a1, a2) = example1();
        for &alpha in &[0.6, 0.9] {
            let coarse = phase_difference_sweep(
                &a1,
                &a2,
                alpha,
                &FrequencyGrid::new(1e-4, 1e4, 2000).unwrap(),
            )
            .unwrap()
            .max_diff;
            let fine = phase_difference_sweep(
                &a1,
                &a2,
                alpha,
                &FrequencyGrid::new(1e-4, 1e4, 4000).unwrap(),
            )
            .unwrap()
            .max_diff;
            assert!(fine >= coarse - 1e-6, "alpha={alpha}: {fine} < {coarse}");
        }
    }

    #[test]
    fn verdict_subsystem_unstable() {
        let sys = SwitchedSystem::new(vec![m2(-1.0, 0.0, 0.0, -1.0), m2(0.5, 0.0, 0.0, 0.5)], 0.8)
            .unwrap();
        let rec = switching_stability_verdict(&sys, &FrequencyGrid::default(), false).unwrap();
        assert_eq!(rec.verdict, SwitchingVerdict::SubsystemUnstable(1));
    }

    #[test]
    fn verdict_example2_stable_then_inconclusive() {
        let (a1, a2) = example2();
        let g = FrequencyGrid::default();
        let sys16 = SwitchedSystem::new(vec![a1.clone(), a2.clone()], 1.6).unwrap();
        let rec = switching_stability_verdict(&sys16, &g, false).unwrap();
        assert_eq!(rec.verdict, SwitchingVerdict::QuadraticallyStable);
        let sys166 = SwitchedSystem::new(vec![a1, a2], 1.66).unwrap();
        let rec = switching_stability_verdict(&sys166, &g, false).unwrap();
        assert_eq!(rec.verdict, SwitchingVerdict::Inconclusive);
    }

    #[test]
    fn verdict_with_certification() {
        // Companion pair with overlapping dynamics: phase stays below the
        // threshold and a certificate exists.
        let a1 = m2(0.0, 1.0, -1.0, -1.2);
        let a2 = m2(0.0, 1.0, -1.5, -1.0);
        let sys = SwitchedSystem::new(vec![a1, a2], 1.0).unwrap();
        let rec = switching_stability_verdict(&sys, &FrequencyGrid::default(), true).unwrap();
        assert_eq!(rec.verdict, SwitchingVerdict::QuadraticallyStable);
        assert!(rec.certificate.is_some());
    }
}
