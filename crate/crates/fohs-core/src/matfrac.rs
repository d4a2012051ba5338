//! Dense spectral kernel for fractional-order LTI systems.
//!
//! Everything here works on small (n ≲ 10) dense matrices: spectral
//! decomposition with an eigenvector-condition estimate, principal
//! fractional matrix powers computed spectrally, the stability transform
//! `-(-A)^(1/(2-alpha))` that maps a fractional-order stability question
//! onto an ordinary Lyapunov one, and eigenvalue-argument stability
//! margins.
//!
//! Fractional powers use the principal logarithm (argument in `(-pi, pi]`).
//! Eigenvalues of the base matrix on the closed negative real axis are
//! rejected rather than perturbed: a silent perturbation there could flip
//! a stability verdict.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Default cap on the eigenvector-matrix condition estimate. Above this the
/// spectral route to a fractional power is untrustworthy.
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

/// Results that are mathematically real are truncated to a real matrix when
/// the imaginary residue is below this fraction of the result norm.
pub const REAL_TRUNCATION_REL: f64 = 1e-9;

/// Accepted decompositions must reconstruct `A V = V diag(lambda)` to this
/// fraction of `||A||`.
pub const RESIDUAL_REL: f64 = 1e-10;

/// A single fractional-order linear time-invariant mode: the dynamics
/// matrix together with the commensurate differentiation order.
#[derive(Debug, Clone, PartialEq)]
pub struct FoLtiSystem {
    a: DMatrix<f64>,
    alpha: f64,
}

impl FoLtiSystem {
    /// Builds a mode, checking that `a` is square with finite entries and
    /// that the order lies strictly inside `(0, 2)`.
    pub fn new(a: DMatrix<f64>, alpha: f64) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NonSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(
                "dynamics matrix has non-finite entries".into(),
            ));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::OrderOutOfRange {
                alpha,
                range: "(0, 2)",
            });
        }
        Ok(Self { a, alpha })
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Eigenvalues, right eigenvectors and a condition estimate for a real
/// square matrix. Eigenvalues are sorted lexicographically by
/// (real, imaginary) part; eigenvector columns follow that order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right_eigenvectors: DMatrix<Complex64>,
    /// `||V||_F * ||V^-1||_F`, always >= 1 for nonsingular `V`.
    pub condition_estimate: f64,
}

pub(crate) fn complexify(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

pub(crate) fn frob_norm(a: &DMatrix<f64>) -> f64 {
    math::sqrt(a.iter().map(|x| x * x).sum())
}

pub(crate) fn frob_norm_c(a: &DMatrix<Complex64>) -> f64 {
    math::sqrt(a.iter().map(|x| x.norm_sqr()).sum())
}

fn ensure_square(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Eigenvalues only (via the real Schur form), sorted lexicographically by
/// (real, imaginary) part. Works for defective matrices.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    ensure_square(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let schur =
        nalgebra::linalg::Schur::try_new(a.clone(), 1e-14, 0).ok_or(Error::EigenConvergence)?;
    let mut eig: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(eig)
}

/// Groups sorted eigenvalues into clusters closer than `tol`.
fn cluster(eig: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = eig.len();
    let mut group_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if group_of[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        group_of[i] = g;
        let mut members = vec![i];
        // Transitive closure over the epsilon-graph.
        let mut cursor = 0;
        while cursor < members.len() {
            let m = members[cursor];
            for j in 0..n {
                if group_of[j] == usize::MAX && (eig[j] - eig[m]).norm() <= tol {
                    group_of[j] = g;
                    members.push(j);
                }
            }
            cursor += 1;
        }
        groups.push(members);
    }
    groups
}

/// Orthonormal basis (columns) for the numerical null space of `m`,
/// taken as the right singular vectors of the `count` smallest singular
/// values.
fn null_basis(m: &DMatrix<Complex64>, count: usize) -> Result<Vec<DVector<Complex64>>> {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(Error::EigenConvergence)?;
    // nalgebra sorts singular values in decreasing order; the null space
    // lives in the trailing rows of V^H.
    let mut basis = Vec::with_capacity(count);
    for k in 0..count {
        let row = v_t.row(n - 1 - k);
        let mut v = DVector::from_iterator(n, row.iter().map(|z| z.conj()));
        normalize_phase(&mut v);
        basis.push(v);
    }
    Ok(basis)
}

/// Scales a unit vector so its largest-modulus entry is real positive.
/// Makes eigenvector columns deterministic and keeps conjugate pairs
/// exactly conjugate after the analogous fix.
fn normalize_phase(v: &mut DVector<Complex64>) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            idx = i;
        }
    }
    if best > 0.0 {
        let phase = v[idx] / Complex64::new(best, 0.0);
        let inv = phase.conj();
        for z in v.iter_mut() {
            *z *= inv;
        }
    }
}

/// Full spectral decomposition with the default condition cap.
pub fn spectral_decompose(a: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    spectral_decompose_with_cap(a, DEFAULT_CONDITION_CAP)
}

/// Full spectral decomposition of a real square matrix.
///
/// Eigenvalues come from the real Schur form; eigenvectors are recovered
/// per eigenvalue cluster as the null space of the shifted matrix. Near
/// defective inputs are rejected: either the reconstruction residual
/// exceeds [`RESIDUAL_REL`]` * ||A||` or the eigenvector condition
/// estimate exceeds `condition_cap`.
pub fn spectral_decompose_with_cap(
    a: &DMatrix<f64>,
    condition_cap: f64,
) -> Result<SpectralDecomposition> {
    let n = ensure_square(a)?;
    let eig = eigenvalues(a)?;
    let scale = frob_norm(a);
    let ac = complexify(a);

    let group_tol = 1e-7 * (1.0 + scale);
    let groups = cluster(&eig, group_tol);

    let mut vectors: Vec<Option<DVector<Complex64>>> = vec![None; n];
    // Process clusters with non-negative mean imaginary part first; their
    // conjugate clusters reuse the conjugated vectors so a real input gets
    // exactly conjugate-symmetric eigenvectors.
    let mean = |members: &[usize]| -> Complex64 {
        members.iter().map(|&i| eig[i]).sum::<Complex64>() / members.len() as f64
    };
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&x, &y| {
        let a = mean(&groups[x]).im;
        let b = mean(&groups[y]).im;
        b.partial_cmp(&a).unwrap()
    });
    for gi in order {
        let members = &groups[gi];
        let lambda = mean(members);
        if lambda.im < 0.0 {
            // Try to reuse the conjugate cluster's vectors.
            if let Some(src) = groups
                .iter()
                .find(|g| (mean(g) - lambda.conj()).norm() <= group_tol)
            {
                if src.iter().all(|&i| vectors[i].is_some()) && src.len() == members.len() {
                    for (k, &i) in members.iter().enumerate() {
                        let v = vectors[src[k]].as_ref().unwrap().map(|z| z.conj());
                        vectors[i] = Some(v);
                    }
                    continue;
                }
            }
        }
        let mut shifted = ac.clone();
        for d in 0..n {
            shifted[(d, d)] -= lambda;
        }
        let basis = null_basis(&shifted, members.len())?;
        for (k, &i) in members.iter().enumerate() {
            vectors[i] = Some(basis[k].clone());
        }
    }

    let mut v = DMatrix::<Complex64>::zeros(n, n);
    for (i, col) in vectors.into_iter().enumerate() {
        v.set_column(i, &col.expect("every eigenvalue got a vector"));
    }

    // Reconstruction residual ||A V - V diag(lambda)||_F.
    let mut recon = &ac * &v;
    for (i, &l) in eig.iter().enumerate() {
        let mut col = recon.column_mut(i);
        for (r, z) in col.iter_mut().enumerate() {
            *z -= l * v[(r, i)];
        }
    }
    let residual = frob_norm_c(&recon);
    if residual > RESIDUAL_REL * (1.0 + scale) {
        return Err(Error::DefectiveMatrix {
            condition: f64::INFINITY,
            cap: condition_cap,
        });
    }

    let v_inv = v.clone().lu().try_inverse().ok_or(Error::DefectiveMatrix {
        condition: f64::INFINITY,
        cap: condition_cap,
    })?;
    let condition_estimate = frob_norm_c(&v) * frob_norm_c(&v_inv);
    if !condition_estimate.is_finite() || condition_estimate > condition_cap {
        return Err(Error::DefectiveMatrix {
            condition: condition_estimate,
            cap: condition_cap,
        });
    }

    Ok(SpectralDecomposition {
        eigenvalues: eig,
        right_eigenvectors: v,
        condition_estimate,
    })
}

/// Principal fractional matrix power `A^p`, computed spectrally as
/// `V diag(lambda_i^p) V^-1` with `lambda^p = exp(p Log lambda)`.
///
/// Errors with [`Error::BranchCutEigenvalue`] when an eigenvalue of `A`
/// lies on the closed negative real axis, and with
/// [`Error::DefectiveMatrix`] when the eigenvector basis is untrustworthy.
pub fn frac_power(a: &DMatrix<f64>, p: f64) -> Result<DMatrix<Complex64>> {
    let n = ensure_square(a)?;
    let dec = spectral_decompose(a)?;
    let cut_tol = 1e-12 * (1.0 + frob_norm(a));
    for &l in &dec.eigenvalues {
        if l.im.abs() <= cut_tol && l.re <= cut_tol {
            return Err(Error::BranchCutEigenvalue { eigenvalue: l });
        }
    }
    let v = &dec.right_eigenvectors;
    // W = V diag(lambda^p)
    let mut w = v.clone();
    for (i, &l) in dec.eigenvalues.iter().enumerate() {
        let lp = l.powf(p);
        for r in 0..n {
            w[(r, i)] *= lp;
        }
    }
    // result = W V^-1  <=>  V^T result^T = W^T
    let vt = v.transpose();
    let wt = w.transpose();
    let res_t = vt.lu().solve(&wt).ok_or(Error::DefectiveMatrix {
        condition: dec.condition_estimate,
        cap: DEFAULT_CONDITION_CAP,
    })?;
    Ok(res_t.transpose())
}

/// Like [`frac_power`] but truncates a mathematically real result to a real
/// matrix. Errors with [`Error::ResidualImaginary`] when the imaginary
/// residue exceeds [`REAL_TRUNCATION_REL`] times the result norm.
pub fn frac_power_real(a: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    let m = frac_power(a, p)?;
    let norm = frob_norm_c(&m).max(f64::MIN_POSITIVE);
    let max_imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > REAL_TRUNCATION_REL * norm {
        return Err(Error::ResidualImaginary { max_imag, norm });
    }
    Ok(m.map(|z| z.re))
}

/// The stability transform `-(-A)^(1/(2-alpha))` for orders in `(0, 1]`.
///
/// At `alpha = 1` this is exactly `A` (returned without any decomposition).
/// The spectrum satisfies `eig = -(-lambda_i)^(1/(2-alpha))` elementwise.
pub fn curly_a(sys: &FoLtiSystem) -> Result<DMatrix<f64>> {
    if sys.alpha > 1.0 {
        return Err(Error::OrderOutOfRange {
            alpha: sys.alpha,
            range: "(0, 1]",
        });
    }
    if sys.alpha == 1.0 {
        return Ok(sys.a.clone());
    }
    let p = 1.0 / (2.0 - sys.alpha);
    let neg_a = -&sys.a;
    Ok(-frac_power_real(&neg_a, p)?)
}

/// Stability margin of a single mode: the minimum over eigenvalues of
/// `|arg(lambda)| - alpha * pi / 2`.
///
/// Positive means the mode is asymptotically stable, negative unstable,
/// and values within about `1e-9` of zero are marginal. Uses eigenvalues
/// only, so defective matrices are fine.
pub fn folti_stability_margin(sys: &FoLtiSystem) -> Result<f64> {
    let eig = eigenvalues(&sys.a)?;
    let half = sys.alpha * core::f64::consts::PI / 2.0;
    let mut margin = f64::INFINITY;
    for l in eig {
        let arg = math::atan2(l.im, l.re).abs();
        margin = margin.min(arg - half);
    }
    Ok(margin)
}

/// True when every eigenvalue has strictly negative real part.
pub fn is_hurwitz(a: &DMatrix<f64>) -> Result<bool> {
    Ok(eigenvalues(a)?.iter().all(|l| l.re < 0.0))
}
