//! Deterministic seeded generators for numerical test corpora.
//!
//! The generators use a small embedded PRNG instead of an external crate so
//! corpora are bit-identical across platforms and feature sets.

use nalgebra::DMatrix;

use crate::matfrac;

/// SplitMix64: tiny, fast, full-period 2^64 generator. Good enough for
/// sampling test matrices and switching-layer choices; not for cryptography.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`.
    pub fn next_index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random 3x3 Hurwitz matrix with entries in `[-1, 1]`, rejection-sampled
/// so the eigenvector basis is well conditioned (fractional powers of
/// near-defective draws would be dominated by basis error, not by the
/// operation under test).
pub fn hurwitz_3x3(rng: &mut SplitMix64) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(3, 3, |_, _| rng.uniform(-1.0, 1.0));
        let Ok(eig) = matfrac::eigenvalues(&a) else {
            continue;
        };
        if !eig.iter().all(|l| l.re < -1e-3) {
            continue;
        }
        match matfrac::spectral_decompose(&a) {
            Ok(d) if d.condition_estimate < 1e4 => return a,
            _ => continue,
        }
    }
}

/// Random stable 2x2 companion matrix for order `alpha`: eigenvalues are
/// sampled with `|arg| > alpha * pi / 2` plus a safety margin, either as a
/// complex-conjugate pair or as two negative reals.
pub fn stable_companion_2x2(rng: &mut SplitMix64, alpha: f64) -> DMatrix<f64> {
    let half = alpha * core::f64::consts::PI / 2.0;
    let (trace, det) = if rng.next_f64() < 0.5 && half + 0.05 < core::f64::consts::PI - 0.05 {
        // Conjugate pair rho * exp(+-j theta).
        let rho = libm::exp(rng.uniform(libm::log(0.25), libm::log(3.0)));
        let theta = rng.uniform(half + 0.05, core::f64::consts::PI - 0.02);
        (2.0 * rho * libm::cos(theta), rho * rho)
    } else {
        // Two negative reals (|arg| = pi, stable for any alpha < 2).
        let l1 = -libm::exp(rng.uniform(libm::log(0.25), libm::log(3.0)));
        let l2 = -libm::exp(rng.uniform(libm::log(0.25), libm::log(3.0)));
        (l1 + l2, l1 * l2)
    };
    // Companion of s^2 - trace s + det.
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -det, trace])
}

/// Random stable 2x2 mode for the LMI / phase-sweep equivalence corpus.
///
/// For orders at or below one, the pairwise frequency-domain equivalence is
/// a statement about the transformed matrices `curly_a(A)`, and it is exact
/// when those transforms sit in companion (phase-variable) coordinates. The
/// generator therefore draws a Hurwitz companion matrix `M` and returns the
/// unique `A` with `curly_a(A) = M`, i.e. `A = -(-M)^(2-alpha)`. For orders
/// above one the mode itself is drawn in companion form, stable for the
/// requested order.
pub fn equivalence_mode_2x2(rng: &mut SplitMix64, alpha: f64) -> DMatrix<f64> {
    if alpha > 1.0 {
        return stable_companion_2x2(rng, alpha);
    }
    let m = stable_companion_2x2(rng, 1.0);
    if alpha == 1.0 {
        return m;
    }
    let neg = -m;
    let a = matfrac::frac_power_real(&neg, 2.0 - alpha)
        .expect("Hurwitz companion has no spectrum on the branch cut");
    -a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfrac::{curly_a, folti_stability_margin, FoLtiSystem};

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn hurwitz_corpus_is_hurwitz() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let a = hurwitz_3x3(&mut rng);
            assert!(matfrac::is_hurwitz(&a).unwrap());
        }
    }

    #[test]
    fn equivalence_modes_are_stable_and_transform_to_companion() {
        let mut rng = SplitMix64::new(11);
        for &alpha in &[0.5, 1.0, 1.3] {
            for _ in 0..20 {
                let a = equivalence_mode_2x2(&mut rng, alpha);
                let sys = FoLtiSystem::new(a.clone(), alpha).unwrap();
                assert!(folti_stability_margin(&sys).unwrap() > 0.0);
                if alpha <= 1.0 {
                    let m = curly_a(&sys).unwrap();
                    // Companion shape: top row (0, 1).
                    assert!((m[(0, 0)]).abs() < 1e-8, "{m}");
                    assert!((m[(0, 1)] - 1.0).abs() < 1e-8, "{m}");
                }
            }
        }
    }
}
