use alloc::string::String;
use num_complex::Complex64;

/// Errors shared by every subsystem of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A matrix expected to be square was not.
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    /// Two operands disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix expected to be symmetric was not (to the stated tolerance).
    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    /// The eigenvector matrix is too ill-conditioned for a trustworthy
    /// fractional power (near-defective input).
    #[error("matrix is defective or near-defective: eigenvector condition {condition:e} exceeds cap {cap:e}")]
    DefectiveMatrix { condition: f64, cap: f64 },

    /// The QR eigenvalue iteration failed to converge.
    #[error("eigenvalue iteration failed to converge")]
    EigenConvergence,

    /// An eigenvalue of the power base lies on the principal branch cut
    /// (the closed negative real axis), so the principal power is undefined.
    #[error("eigenvalue {eigenvalue} lies on the principal branch cut (non-positive real axis)")]
    BranchCutEigenvalue { eigenvalue: Complex64 },

    /// A mathematically real result came back with a non-negligible
    /// imaginary part, indicating an unreliable decomposition.
    #[error("result has non-negligible imaginary part: max {max_imag:e} vs norm {norm:e}")]
    ResidualImaginary { max_imag: f64, norm: f64 },

    /// The fractional order is outside the range the operation supports.
    #[error("order alpha = {alpha} outside supported range {range}")]
    OrderOutOfRange { alpha: f64, range: &'static str },

    /// A theorem precondition failed: the indexed subsystem is not
    /// asymptotically stable on its own.
    #[error("subsystem {index} is unstable (stability margin {margin:e})")]
    SubsystemUnstable { index: usize, margin: f64 },

    /// Resolvent evaluation at a point in the spectrum.
    #[error("resolvent is singular at s = {s}")]
    SingularResolvent { s: Complex64 },

    /// Transfer function has numerator degree exceeding denominator degree
    /// where a state-space realization requires a proper function.
    #[error("improper transfer function: numerator degree {num_degree} > denominator degree {den_degree}")]
    ImproperTransferFunction {
        num_degree: usize,
        den_degree: usize,
    },

    /// Orders cannot be placed on a common commensurate lattice.
    #[error("incommensurate orders: {q_from} is not an integer multiple of {q_to}")]
    IncommensurateOrders { q_from: f64, q_to: f64 },

    /// Explicit-scheme divergence guard tripped.
    #[error("time step too large: ||h^alpha A|| = {norm:e} > 1")]
    StepTooLarge { norm: f64 },

    /// Reset events accumulating faster than the sampling resolution.
    #[error(
        "zeno guard tripped at t = {time}: resets at consecutive samples for {samples} samples"
    )]
    ZenoGuard { time: f64, samples: usize },

    /// Series evaluation left its managed convergence range.
    #[error("series evaluation failed to converge: {reason}")]
    ConvergenceFailure { reason: &'static str },

    /// Malformed input not covered by a more specific variant.
    #[error("invalid input: {0}")]
    Invalid(String),
}
