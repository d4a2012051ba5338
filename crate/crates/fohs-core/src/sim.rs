//! Fixed-step Grünwald–Letnikov simulation of fractional switched and
//! reset systems, plus a Mittag-Leffler series oracle for validation.
//!
//! The scheme is the explicit memory-convolution form: with weights
//! `c_0 = 1, c_j = c_{j-1} (1 - (alpha+1)/j)` and deviation
//! `y_k = x_k - x_0`,
//!
//! `y_k = h^alpha f(x_{k-1}) - sum_{j=1..k} c_j y_{k-j}`.
//!
//! Initial conditions enter Caputo-style: the simulated quantity is the
//! deviation from the initial state, so constant initial states carry no
//! spurious singular memory. At order one the weights collapse to
//! `[1, -1, 0, ...]` and the scheme is forward Euler.
//!
//! Reset jumps are sample-synchronous: membership detected at one sample
//! makes the next sample `A_R x` (no flow on that step). By default the
//! fractional memory of the states that were reset restarts at the jump;
//! the retain policy keeps their full pre-jump history instead.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::lmi::SwitchedSystem;
use crate::matfrac::frob_norm;
use crate::math;
use crate::reset::ResetControlSystem;
use crate::{Error, Result};

/// Surface tolerance scale for reset detection: `|e| <= 1e-9 ||x||`.
pub const SURFACE_TOL_REL: f64 = 1e-9;

/// A state is considered resettable only if the reset would actually move
/// it: `||(I - A_R) x|| >` this.
pub const STATE_TOL: f64 = 1e-12;

/// Grünwald–Letnikov weights `(-1)^j binom(alpha, j)` for `j = 0..count`,
/// by the stable product recurrence.
pub fn gl_coefficients(alpha: f64, count: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(count + 1);
    c.push(1.0);
    for j in 1..=count {
        let prev = c[j - 1];
        c.push(prev * (1.0 - (alpha + 1.0) / j as f64));
    }
    c
}

/// One-parameter Mittag-Leffler function `E_alpha(z)` for real arguments,
/// by adaptive series summation in log space.
///
/// Terms are generated as `exp(k ln|z| - ln Gamma(alpha k + 1))` and the
/// series stops once terms are past their peak and below `1e-16` of the
/// running sum. Arguments whose peak term overflows `f64`, or whose
/// alternating cancellation would leave fewer than two significant
/// digits, return [`Error::ConvergenceFailure`]; for negative arguments
/// the practical range shrinks as `alpha` decreases.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if alpha <= 0.0 || alpha.is_nan() {
        return Err(Error::Invalid("mittag_leffler needs alpha > 0".into()));
    }
    if !z.is_finite() {
        return Err(Error::Invalid(
            "mittag_leffler needs a finite argument".into(),
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let ln_abs_z = math::ln(z.abs());
    let negative = z < 0.0;

    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut max_term = 0.0f64;
    let mut prev_magnitude = f64::INFINITY;
    let mut converged = false;
    for k in 0..=10_000usize {
        let ln_term = k as f64 * ln_abs_z - math::ln_gamma(alpha * k as f64 + 1.0);
        if ln_term > 700.0 {
            return Err(Error::ConvergenceFailure {
                reason: "series term overflows f64",
            });
        }
        let magnitude = math::exp(ln_term);
        let term = if negative && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        // Kahan summation: the alternating tails cancel heavily.
        let yk = term - compensation;
        let t = sum + yk;
        compensation = (t - sum) - yk;
        sum = t;
        max_term = max_term.max(magnitude);
        if k > 0 && magnitude < prev_magnitude && magnitude <= 1e-16 * sum.abs().max(1e-300) {
            converged = true;
            break;
        }
        prev_magnitude = magnitude;
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            reason: "series did not converge within the term budget",
        });
    }
    if max_term > 1e14 * sum.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ConvergenceFailure {
            reason: "catastrophic cancellation in alternating series",
        });
    }
    Ok(sum)
}

/// Switching rule selecting the active mode at each sample.
#[derive(Debug, Clone, PartialEq)]
pub enum SwitchingRule {
    /// Uniformly random mode each sample (adversarial arbitrary
    /// switching), deterministic for a given seed.
    ArbitrarySeeded { seed: u64 },
    /// Two half-plane regions split by `normal . x`, with an overlap band
    /// `|normal . x| <= band` where the mode is chosen at random
    /// (seeded). Mode 0 is active on the positive side.
    StateRegions {
        normal: Vec<f64>,
        band: f64,
        seed: u64,
    },
}

/// What happens to the Grünwald–Letnikov history of states that were
/// reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResetMemory {
    /// Reset states restart their fractional memory at the jump instant:
    /// the jump rewrites the state, so stale memory would contradict it
    /// at the very next sample.
    #[default]
    ClearResetStates,
    /// Keep the entire pre-jump history of every state.
    Retain,
}

/// Simulation options.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Number of most recent steps kept in the memory convolution;
    /// `None` keeps the full history.
    pub memory_window: Option<usize>,
    pub reset_memory: ResetMemory,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            memory_window: None,
            reset_memory: ResetMemory::ClearResetStates,
        }
    }
}

/// Discrete event kinds recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Switch,
    Reset,
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub pre_state: DVector<f64>,
    pub post_state: DVector<f64>,
}

/// A simulated trajectory on a uniform time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// Index of the mode active on the interval starting at each sample
    /// (always 0 for reset systems).
    pub active_modes: Vec<usize>,
    /// Scalar output per sample: `C_cl x` for reset loops, `||x||` for
    /// switched systems.
    pub outputs: Vec<f64>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectories are never empty")
    }
}

struct GlHistory {
    /// Deviation history per component, indexed `[component][step]`.
    y: Vec<Vec<f64>>,
    /// Caputo base value per component.
    base: Vec<f64>,
    /// Step at which each component's memory starts.
    start: Vec<usize>,
    window: usize,
}

impl GlHistory {
    fn new(n: usize, x0: &DVector<f64>, steps: usize, window: Option<usize>) -> Self {
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = Vec::with_capacity(steps + 1);
            v.push(0.0);
            y.push(v);
        }
        Self {
            y,
            base: x0.iter().copied().collect(),
            start: vec![0; n],
            window: window.unwrap_or(usize::MAX),
        }
    }

    /// Memory convolution `sum_{j=1..J} c_j y_i[k-j]` for component `i`
    /// at step `k` (history up to `k-1` must exist).
    fn convolution(&self, coeffs: &[f64], i: usize, k: usize) -> f64 {
        let reach = (k - self.start[i]).min(self.window);
        let hist = &self.y[i];
        let mut acc = 0.0;
        for j in 1..=reach {
            acc += coeffs[j] * hist[k - j];
        }
        acc
    }

    fn push(&mut self, i: usize, value: f64) {
        self.y[i].push(value);
    }
}

fn check_step(h: f64, t_final: f64, norms: &[f64], alpha: f64) -> Result<(usize, f64)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid("step size must be positive".into()));
    }
    if t_final <= h || t_final.is_nan() {
        return Err(Error::Invalid("horizon must exceed the step size".into()));
    }
    let ha = math::powf(h, alpha);
    for &norm in norms {
        let scaled = ha * norm;
        if scaled > 1.0 {
            return Err(Error::StepTooLarge { norm: scaled });
        }
    }
    Ok((math::round(t_final / h) as usize, ha))
}

/// Simulates a fractional switched system under a switching rule.
pub fn simulate_switched(
    sys: &SwitchedSystem,
    rule: &SwitchingRule,
    x0: &DVector<f64>,
    h: f64,
    t_final: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    match rule {
        SwitchingRule::ArbitrarySeeded { .. } => {}
        SwitchingRule::StateRegions { normal, band, .. } => {
            if normal.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: normal.len(),
                });
            }
            if sys.modes().len() != 2 {
                return Err(Error::Invalid(
                    "state-region switching is defined for exactly two modes".into(),
                ));
            }
            if *band < 0.0 || band.is_nan() {
                return Err(Error::Invalid("overlap band must be non-negative".into()));
            }
        }
    }
    let norms: Vec<f64> = sys.modes().iter().map(frob_norm).collect();
    let (steps, ha) = check_step(h, t_final, &norms, sys.alpha())?;

    let coeffs = gl_coefficients(sys.alpha(), steps.min(opts.memory_window.unwrap_or(steps)));
    let mut rng = crate::corpus::SplitMix64::new(match rule {
        SwitchingRule::ArbitrarySeeded { seed } | SwitchingRule::StateRegions { seed, .. } => *seed,
    });
    let select = |x: &DVector<f64>, rng: &mut crate::corpus::SplitMix64| -> usize {
        match rule {
            SwitchingRule::ArbitrarySeeded { .. } => rng.next_index(sys.modes().len()),
            SwitchingRule::StateRegions { normal, band, .. } => {
                let s: f64 = normal.iter().zip(x.iter()).map(|(w, xi)| w * xi).sum();
                if s > *band {
                    0
                } else if s < -*band {
                    1
                } else {
                    rng.next_index(2)
                }
            }
        }
    };

    let mut history = GlHistory::new(n, x0, steps, opts.memory_window);
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut active_modes = Vec::with_capacity(steps + 1);
    let mut events = Vec::new();
    states.push(x0.clone());
    times.push(0.0);
    outputs.push(x0.norm());

    let mut prev_mode: Option<usize> = None;
    for k in 1..=steps {
        let xv = states[k - 1].clone();
        let mode = select(&xv, &mut rng);
        if let Some(p) = prev_mode {
            if p != mode {
                events.push(Event {
                    time: times[k - 1],
                    kind: EventKind::Switch,
                    pre_state: xv.clone(),
                    post_state: xv.clone(),
                });
            }
        }
        active_modes.push(mode);
        prev_mode = Some(mode);

        let drift = &sys.modes()[mode] * &xv;
        let mut x = DVector::<f64>::zeros(n);
        for i in 0..n {
            let yk = ha * drift[i] - history.convolution(&coeffs, i, k);
            history.push(i, yk);
            x[i] = history.base[i] + yk;
        }
        times.push(k as f64 * h);
        outputs.push(x.norm());
        states.push(x);
    }
    active_modes.push(*active_modes.last().unwrap_or(&0));

    Ok(Trajectory {
        times,
        states,
        active_modes,
        outputs,
        events,
    })
}

/// Simulates a fractional reset control loop with sample-synchronous
/// jumps.
///
/// Membership in the reset surface is detected on each new sample (error
/// sign change or `|e| <=` [`SURFACE_TOL_REL`]` ||x||`, with a nonzero
/// resettable part); the following sample is then `A_R x` with no flow.
/// Because a jump zeroes the resettable part, two consecutive jump
/// samples are impossible under these semantics; the Zeno guard is kept
/// as a defensive invariant on that property.
pub fn simulate_reset(
    sys: &ResetControlSystem,
    x0: &DVector<f64>,
    h: f64,
    t_final: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    let (steps, ha) = check_step(h, t_final, &[frob_norm(sys.a_cl())], sys.alpha())?;
    let coeffs = gl_coefficients(sys.alpha(), steps.min(opts.memory_window.unwrap_or(steps)));
    let r = sys.reference();
    let n_reset = sys.dims().n_reset;

    let mut history = GlHistory::new(n, x0, steps, opts.memory_window);
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut events = Vec::new();
    states.push(x0.clone());
    times.push(0.0);
    outputs.push((sys.c_cl() * x0)[0]);

    let mut pending_jump = false;
    let mut prev_error = r - outputs[0];
    let mut recent_resets: VecDeque<usize> = VecDeque::new();
    let mut consecutive_pairs = 0usize;

    for k in 1..=steps {
        let x = if pending_jump {
            let pre = states[k - 1].clone();
            let post = sys.a_r() * &pre;
            events.push(Event {
                time: k as f64 * h,
                kind: EventKind::Reset,
                pre_state: pre,
                post_state: post.clone(),
            });
            if opts.reset_memory == ResetMemory::ClearResetStates {
                for i in (n - n_reset)..n {
                    history.start[i] = k;
                    history.base[i] = 0.0;
                }
            }
            for i in 0..n {
                let value = post[i] - history.base[i];
                history.push(i, value);
            }
            // Zeno bookkeeping.
            if recent_resets.back().is_some_and(|&last| k == last + 1) {
                consecutive_pairs += 1;
                if consecutive_pairs >= 100 {
                    return Err(Error::ZenoGuard {
                        time: k as f64 * h,
                        samples: 100,
                    });
                }
            } else {
                consecutive_pairs = 0;
            }
            recent_resets.push_back(k);
            if recent_resets.len() > 100 {
                recent_resets.pop_front();
            }
            pending_jump = false;
            post
        } else {
            let xv = &states[k - 1];
            let drift = sys.a_cl() * xv + sys.b_cl() * r;
            let mut x = DVector::<f64>::zeros(n);
            for i in 0..n {
                let yk = ha * drift[i] - history.convolution(&coeffs, i, k);
                history.push(i, yk);
                x[i] = history.base[i] + yk;
            }
            x
        };

        let y = (sys.c_cl() * &x)[0];
        let e = r - y;
        let movable = {
            let resettable: f64 = x.iter().skip(n - n_reset).map(|v| v * v).sum::<f64>();
            math::sqrt(resettable) > STATE_TOL
        };
        let crossed = e * prev_error < 0.0;
        let on_surface =
            (crossed && movable) || sys.on_reset_surface(&x, SURFACE_TOL_REL, STATE_TOL);
        if on_surface && k < steps {
            pending_jump = true;
        }
        prev_error = e;
        times.push(k as f64 * h);
        outputs.push(y);
        states.push(x);
    }

    let len = states.len();
    Ok(Trajectory {
        times,
        states,
        active_modes: vec![0; len],
        outputs,
        events,
    })
}
