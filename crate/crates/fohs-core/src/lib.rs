//! Stability certification and simulation kernels for fractional-order
//! hybrid systems: switched linear systems and reset control loops with
//! commensurate fractional dynamics.
//!
//! The crate is organized around five subsystems:
//!
//! - [`matfrac`] — dense spectral kernel: eigendecompositions, principal
//!   fractional matrix powers, the stability transform used by the
//!   fractional Lyapunov tests, and eigenvalue-argument stability margins.
//! - [`lmi`] — Lyapunov matrix-inequality blocks for fractional orders,
//!   certificate verification, and a common-certificate search based on
//!   alternating projections.
//! - [`switching`] — frequency-domain tests: phase-of-determinant sweeps,
//!   pairwise phase differences, and the overall switched-system verdict.
//! - [`reset`] — reset control loops (Clegg integrator, first-order reset
//!   element and their fractional counterparts): closed-loop assembly from
//!   transfer functions, the H-beta transfer evaluation, SPR phase checks,
//!   beta-range search, and Lyapunov-like reset certificates.
//! - [`sim`] — fixed-step Grünwald–Letnikov simulation of switched and
//!   reset trajectories plus a Mittag-Leffler series oracle.
//!
//! All computations are plain `f64` on heap-allocated dense matrices; the
//! crate is `no_std`-compatible (with `alloc`) when built without the
//! default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod corpus;
mod error;
pub mod lmi;
pub mod matfrac;
pub(crate) mod math;
pub mod reset;
pub mod sim;
pub mod switching;

pub use error::Error;

// Re-exported so downstream crates build against the same matrix types.
pub use nalgebra;
pub use num_complex;

/// Convenience alias used by all fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;

pub use lmi::{CertificateOutcome, LyapunovCertificate, SearchOutcome, SwitchedSystem};
pub use matfrac::{FoLtiSystem, SpectralDecomposition};
pub use reset::{
    BetaInterval, CommensurateTransferFunction, HBetaResult, ResetCertificateCheck,
    ResetControlSystem, ResetDims,
};
pub use sim::{ResetMemory, SimOptions, SwitchingRule, Trajectory};
pub use switching::{FrequencyGrid, PhaseSweepResult, SwitchingVerdict, VerdictRecord};
