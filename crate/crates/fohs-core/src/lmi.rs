//! Lyapunov matrix-inequality construction, certificate verification and a
//! common-certificate search for fractional-order switched systems.
//!
//! For orders in `(0, 1]` the mode inequality is `M' P + P M < 0` with
//! `M = curly_a(A)`; at order one that degenerates to the ordinary Lyapunov
//! inequality. For orders in `(1, 2)` the test is the 2n x 2n block
//! inequality mixing `A' P + P A` and `A' P - P A` through `sin(phi)` and
//! `cos(phi)`, `phi = alpha pi / 2`.
//!
//! The search is deliberately a heuristic: alternating projections between
//! the positive-definite cone and the per-mode negativity constraints
//! (eigenvalue clipping of each block followed by a least-squares
//! back-solve). Whatever it returns is re-checked exactly; the certificate,
//! not the search, is the proof.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Dyn};

use crate::matfrac::{curly_a, folti_stability_margin, frob_norm, FoLtiSystem};
use crate::math;
use crate::{Error, Result};

/// A convex family of fractional-order modes sharing one order.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedSystem {
    modes: Vec<DMatrix<f64>>,
    alpha: f64,
}

impl SwitchedSystem {
    pub fn new(modes: Vec<DMatrix<f64>>, alpha: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Invalid(
                "switched system needs at least one mode".into(),
            ));
        }
        let n = modes[0].nrows();
        for m in &modes {
            if m.nrows() != m.ncols() {
                return Err(Error::NonSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid("mode matrix has non-finite entries".into()));
            }
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::OrderOutOfRange {
                alpha,
                range: "(0, 2)",
            });
        }
        Ok(Self { modes, alpha })
    }

    pub fn modes(&self) -> &[DMatrix<f64>] {
        &self.modes
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.modes[0].nrows()
    }

    pub fn mode_system(&self, i: usize) -> FoLtiSystem {
        FoLtiSystem::new(self.modes[i].clone(), self.alpha)
            .expect("modes validated at construction")
    }
}

/// A verified common quadratic Lyapunov certificate.
#[derive(Debug, Clone)]
pub struct LyapunovCertificate {
    /// Symmetric positive definite matrix.
    pub p_matrix: DMatrix<f64>,
    /// Per-mode margin: most positive eigenvalue of the mode block, sign
    /// flipped, so positive means the inequality holds strictly.
    pub margins: Vec<f64>,
    /// Smallest eigenvalue of `p_matrix`.
    pub p_min_eig: f64,
}

/// Result of checking a candidate `P` against every mode.
#[derive(Debug, Clone)]
pub enum CertificateOutcome {
    Accepted(LyapunovCertificate),
    Rejected { margins: Vec<f64>, p_min_eig: f64 },
}

impl CertificateOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CertificateOutcome::Accepted(_))
    }

    pub fn margins(&self) -> &[f64] {
        match self {
            CertificateOutcome::Accepted(c) => &c.margins,
            CertificateOutcome::Rejected { margins, .. } => margins,
        }
    }
}

/// Why the search returned without a certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum NotFoundReason {
    /// A mode fails its own stability test, so no common certificate can
    /// exist (theorem precondition violated).
    SubsystemUnstable { index: usize, margin: f64 },
    /// Iteration budget exhausted or the iteration stalled. Inconclusive:
    /// absence of a common quadratic certificate is not an instability
    /// proof.
    NoConvergence { iterations: usize },
}

/// Outcome of [`find_common_p`].
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(LyapunovCertificate),
    NotFound(NotFoundReason),
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn certificate(&self) -> Option<&LyapunovCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Tuning knobs for [`find_common_p_with`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub max_iter: usize,
    /// Strictness shift for the positive-definite cone `P >= eps_p I`.
    pub eps_p: f64,
    /// Per-mode strictness `block <= -eps_rel ||M|| I`.
    pub eps_rel: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            eps_p: 1e-6,
            eps_rel: 1e-6,
        }
    }
}

fn check_symmetric(p: &DMatrix<f64>) -> Result<()> {
    let scale = 1.0 + frob_norm(p);
    let mut worst = 0.0f64;
    for i in 0..p.nrows() {
        for j in (i + 1)..p.ncols() {
            worst = worst.max((p[(i, j)] - p[(j, i)]).abs());
        }
    }
    if worst > 1e-12 * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: worst,
        });
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let se = nalgebra::linalg::SymmetricEigen::new(symmetrize(m));
    (se.eigenvalues, se.eigenvectors)
}

pub(crate) fn max_eig_sym(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen(m);
    vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_eig_sym(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen(m);
    vals.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `M' P + P M` with `M = curly_a(A, alpha)`, for orders in `(0, 1]`.
/// Symmetric by construction (numerically symmetrized).
pub fn lmi_block_low(a: &DMatrix<f64>, alpha: f64, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OrderOutOfRange {
            alpha,
            range: "(0, 1]",
        });
    }
    check_symmetric(p)?;
    if p.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: p.nrows(),
        });
    }
    let m = curly_a(&FoLtiSystem::new(a.clone(), alpha)?)?;
    Ok(symmetrize(&(m.transpose() * p + p * &m)))
}

/// The 2n x 2n block inequality matrix for orders in `[1, 2)`:
/// `[[S sin(phi), K cos(phi)], [(K cos(phi))', S sin(phi)]]` with
/// `S = A'P + PA` and `K = A'P - PA`.
pub fn lmi_block_high(a: &DMatrix<f64>, alpha: f64, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::OrderOutOfRange {
            alpha,
            range: "[1, 2)",
        });
    }
    check_symmetric(p)?;
    let n = a.nrows();
    if p.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.nrows(),
        });
    }
    let phi = alpha * core::f64::consts::PI / 2.0;
    let (s_phi, c_phi) = (math::sin(phi), math::cos(phi));
    let at_p = a.transpose() * p;
    let p_a = p * a;
    let s = symmetrize(&(&at_p + &p_a));
    let k = &at_p - &p_a;
    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(&s * s_phi));
    block.view_mut((n, n), (n, n)).copy_from(&(&s * s_phi));
    block.view_mut((0, n), (n, n)).copy_from(&(&k * c_phi));
    block
        .view_mut((n, 0), (n, n))
        .copy_from(&(&k * c_phi).transpose());
    Ok(symmetrize(&block))
}

/// Order-appropriate block for one mode: plain Lyapunov at order one, the
/// transformed inequality below one, the 2n block above one.
fn mode_block(a: &DMatrix<f64>, alpha: f64, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if alpha <= 1.0 {
        lmi_block_low(a, alpha, p)
    } else {
        lmi_block_high(a, alpha, p)
    }
}

/// Checks a candidate `P` against every mode of the system.
///
/// Accepts iff `P` is symmetric positive definite and every mode block is
/// negative definite (all margins strictly positive).
pub fn verify_certificate(sys: &SwitchedSystem, p: &DMatrix<f64>) -> Result<CertificateOutcome> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(
            "certificate candidate has non-finite entries".into(),
        ));
    }
    check_symmetric(p)?;
    if p.nrows() != sys.dim() || p.ncols() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: p.nrows(),
        });
    }
    let mut margins = Vec::with_capacity(sys.modes.len());
    for a in &sys.modes {
        let block = mode_block(a, sys.alpha, p)?;
        margins.push(-max_eig_sym(&block));
    }
    let p_min_eig = min_eig_sym(p);
    if p_min_eig > 0.0 && margins.iter().all(|&m| m > 0.0 && m.is_finite()) {
        Ok(CertificateOutcome::Accepted(LyapunovCertificate {
            p_matrix: p.clone(),
            margins,
            p_min_eig,
        }))
    } else {
        Ok(CertificateOutcome::Rejected { margins, p_min_eig })
    }
}

fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Per-mode data for the projection loop: the block map as an explicit
/// linear operator on vec(P), factorized once.
struct ModeOp {
    a: DMatrix<f64>,
    alpha: f64,
    eps: f64,
    svd: nalgebra::linalg::SVD<f64, Dyn, Dyn>,
}

impl ModeOp {
    fn new(a: &DMatrix<f64>, alpha: f64, eps_rel: f64) -> Result<Self> {
        let n = a.nrows();
        let base_norm = if alpha <= 1.0 {
            frob_norm(&curly_a(&FoLtiSystem::new(a.clone(), alpha)?)?)
        } else {
            frob_norm(a)
        };
        let block_dim = if alpha <= 1.0 { n } else { 2 * n };
        let mut op = DMatrix::<f64>::zeros(block_dim * block_dim, n * n);
        for col in 0..n * n {
            let mut e = DMatrix::<f64>::zeros(n, n);
            e[(col % n, col / n)] = 1.0;
            // The block formulas are linear in P; symmetry of P is restored
            // after each least-squares solve.
            let e_sym = symmetrize(&e);
            let b = mode_block(a, alpha, &e_sym)?;
            op.set_column(col, &vec_of(&b));
        }
        Ok(Self {
            a: a.clone(),
            alpha,
            eps: eps_rel * base_norm.max(1e-12),
            svd: op.svd(true, true),
        })
    }

    fn block(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        mode_block(&self.a, self.alpha, p).expect("validated in ModeOp::new")
    }

    /// Least-squares preimage of a target block.
    fn back_solve(&self, target: &DMatrix<f64>, n: usize) -> Option<DMatrix<f64>> {
        let rhs = vec_of(target);
        let sol = self.svd.solve(&rhs, 1e-12).ok()?;
        Some(symmetrize(&DMatrix::from_column_slice(
            n,
            n,
            sol.as_slice(),
        )))
    }
}

/// Searches for a common quadratic certificate by alternating projections,
/// with the default options (5000 iterations).
pub fn find_common_p(sys: &SwitchedSystem) -> Result<SearchOutcome> {
    find_common_p_with(sys, &SearchOptions::default())
}

/// Alternating-projection search for a common `P`.
///
/// Every mode must be individually stable (otherwise the answer is an
/// immediate `NotFound` with the failing index). The loop cycles through
/// the modes, clipping each block's spectrum to `<= -eps` and back-solving
/// in the least-squares sense, then projects onto `P >= eps_p I` and
/// renormalizes `trace P = n`. Any candidate that passes the exact
/// verification is returned immediately.
pub fn find_common_p_with(sys: &SwitchedSystem, opts: &SearchOptions) -> Result<SearchOutcome> {
    let n = sys.dim();
    for (i, _) in sys.modes.iter().enumerate() {
        let margin = folti_stability_margin(&sys.mode_system(i))?;
        if margin <= 0.0 {
            return Ok(SearchOutcome::NotFound(NotFoundReason::SubsystemUnstable {
                index: i,
                margin,
            }));
        }
    }

    let ops: Vec<ModeOp> = sys
        .modes
        .iter()
        .map(|a| ModeOp::new(a, sys.alpha, opts.eps_rel))
        .collect::<Result<_>>()?;

    let mut p = DMatrix::<f64>::identity(n, n);
    let mut stalled = 0usize;
    for iter in 0..opts.max_iter {
        let prev = p.clone();
        for op in &ops {
            let b = op.block(&p);
            let (vals, vecs) = sym_eigen(&b);
            let worst = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if worst > -op.eps {
                let clipped =
                    DVector::from_iterator(vals.len(), vals.iter().map(|&l| l.min(-op.eps)));
                let target = &vecs * DMatrix::from_diagonal(&clipped) * vecs.transpose();
                if let Some(next) = op.back_solve(&target, n) {
                    p = next;
                }
            }
        }
        // Positive-definite cone projection.
        let (vals, vecs) = sym_eigen(&p);
        if vals.iter().any(|&l| l < opts.eps_p) {
            let clipped =
                DVector::from_iterator(vals.len(), vals.iter().map(|&l| l.max(opts.eps_p)));
            p = symmetrize(&(&vecs * DMatrix::from_diagonal(&clipped) * vecs.transpose()));
        }
        // Scale normalization: trace P = n.
        let tr = p.trace();
        if tr > 0.0 {
            p *= n as f64 / tr;
        }

        if let CertificateOutcome::Accepted(cert) = verify_certificate(sys, &p)? {
            return Ok(SearchOutcome::Found(cert));
        }

        if frob_norm(&(&p - &prev)) < 1e-13 * n as f64 {
            stalled += 1;
            if stalled >= 30 {
                return Ok(SearchOutcome::NotFound(NotFoundReason::NoConvergence {
                    iterations: iter + 1,
                }));
            }
        } else {
            stalled = 0;
        }
    }
    Ok(SearchOutcome::NotFound(NotFoundReason::NoConvergence {
        iterations: opts.max_iter,
    }))
}
