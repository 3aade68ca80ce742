//! Analytic rotated-parity correlations for n-mode entangled coherent states.
//!
//! The state under study is the even superposition of all modes in |α⟩ and
//! all modes in |−α⟩,
//!
//! ```text
//! |ψ⟩ = N_n (|α⟩⊗…⊗|α⟩ + |−α⟩⊗…⊗|−α⟩),   N_n = [2 + 2e^{−2n|α|²}]^{−1/2}.
//! ```
//!
//! Each mode is measured with a rotated quantum-number parity
//! σ(φ) = R_z(φ) P R_z†(φ), where R_z(φ) = D†(α) G(φ) D(α) applies a vacuum
//! phase gate in the frame displaced by α. Because R_z(φ) =
//! I + (e^{iφ}−1)|−α⟩⟨−α|, the n-mode correlation factorizes over the two
//! branches into products of three single-mode matrix elements:
//!
//! ```text
//! E_n(φ) = N_n² [ Π_k ⟨α|σ(φ_k)|α⟩ + e^{−2n|α|²} + 2 Re Π_k ⟨α|σ(φ_k)|−α⟩ ]
//! ```
//!
//! with ⟨−α|σ(φ)|−α⟩ = e^{−2|α|²} independently of φ.
//!
//! Two variants of the diagonal element are provided (see
//! [`DiagonalKernel`]). The exact element carries the weight e^{−6|α|²} on
//! its (1 − cos φ) term and matches the dense Fock-space oracle to better
//! than 1e−12; the literature variant carries e^{−4|α|²} instead and
//! reproduces the small-α violation thresholds reported in prior published
//! analyses of these correlations. The two coincide at φ = 0 and at α = 0,
//! and differ by O(e^{−4|α|²}) otherwise.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which diagonal matrix element the closed forms use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalKernel {
    /// ⟨α|σ(φ)|α⟩ exactly; agrees with the Fock-space oracle.
    #[default]
    Exact,
    /// The e^{−4|α|²} variant found in prior published analyses; reproduces
    /// their reported thresholds but is not the operator matrix element.
    Literature,
}

/// An n-mode cat state: mode count and complex coherent amplitude.
///
/// Rotated-parity correlations built from a `CatSpec` depend only on |α|;
/// the amplitude is stored complex and the invariance is enforced by test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    n: usize,
    alpha: Complex64,
}

impl CatSpec {
    pub fn new(n: usize, alpha: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(Error::ModeCount(n));
        }
        Ok(Self { n, alpha })
    }

    /// Convenience constructor for a positive-real amplitude.
    pub fn real(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, Complex64::new(alpha, 0.0))
    }

    pub fn mode_count(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// |α|².
    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }
}

/// Normalization N_n = [2 + 2 e^{−2n|α|²}]^{−1/2}.
///
/// Strictly increasing in |α|, from 1/2 at α = 0 to 1/√2 as |α| → ∞.
pub fn normalization(spec: &CatSpec) -> f64 {
    normalization_sq(spec).sqrt()
}

/// N_n² — the quantity that actually enters every correlation.
pub fn normalization_sq(spec: &CatSpec) -> f64 {
    1.0 / (2.0 + 2.0 * (-2.0 * spec.n as f64 * spec.alpha_sq()).exp())
}

/// Diagonal single-mode element ⟨α|σ(φ)|α⟩ (exact kernel):
/// −e^{−2|α|²} + 2e^{−2|α|²} cos φ + 2e^{−6|α|²}(1 − cos φ).
pub fn k_diag(alpha: Complex64, phi: f64) -> f64 {
    k_diag_with(alpha, phi, DiagonalKernel::Exact)
}

/// Literature variant of the diagonal element, with e^{−4|α|²} on the
/// (1 − cos φ) term.
pub fn k_diag_literature(alpha: Complex64, phi: f64) -> f64 {
    k_diag_with(alpha, phi, DiagonalKernel::Literature)
}

pub fn k_diag_with(alpha: Complex64, phi: f64, kernel: DiagonalKernel) -> f64 {
    let a2 = alpha.norm_sqr();
    let c = phi.cos();
    let tail = match kernel {
        DiagonalKernel::Exact => (-6.0 * a2).exp(),
        DiagonalKernel::Literature => (-4.0 * a2).exp(),
    };
    (-2.0 * a2).exp() * (2.0 * c - 1.0) + 2.0 * tail * (1.0 - c)
}

/// Off-diagonal single-mode element ⟨α|σ(φ)|−α⟩ =
/// e^{−iφ} + e^{−4|α|²}(1 − e^{−iφ}). Exact for both kernels.
pub fn k_offdiag(alpha: Complex64, phi: f64) -> Complex64 {
    let a2 = alpha.norm_sqr();
    let e = Complex64::from_polar(1.0, -phi);
    e + (Complex64::new(1.0, 0.0) - e).scale((-4.0 * a2).exp())
}

/// Rotated-parity correlation E_n for the cat state (exact kernel).
pub fn correlation_cat(spec: &CatSpec, angles: &[f64]) -> Result<f64> {
    correlation_cat_with(spec, angles, DiagonalKernel::Exact)
}

/// E_n with an explicit kernel choice.
///
/// Real-valuedness is structural: the conjugate pair of off-diagonal
/// products enters as 2·Re of one product.
pub fn correlation_cat_with(
    spec: &CatSpec,
    angles: &[f64],
    kernel: DiagonalKernel,
) -> Result<f64> {
    spec.check_len(angles.len())?;
    let n2 = normalization_sq(spec);
    let branch_minus = (-2.0 * spec.n as f64 * spec.alpha_sq()).exp();
    let mut diag = 1.0;
    let mut off = Complex64::new(1.0, 0.0);
    for &phi in angles {
        diag *= k_diag_with(spec.alpha, phi, kernel);
        off *= k_offdiag(spec.alpha, phi);
    }
    Ok(n2 * (branch_minus + diag + 2.0 * off.re))
}

/// Correlation for the equally-weighted classical mixture of the two
/// branch products (exact kernel): (1/2)[e^{−2n|α|²} + Π_k K(φ_k)].
pub fn correlation_mixture(spec: &CatSpec, angles: &[f64]) -> Result<f64> {
    correlation_mixture_with(spec, angles, DiagonalKernel::Exact)
}

pub fn correlation_mixture_with(
    spec: &CatSpec,
    angles: &[f64],
    kernel: DiagonalKernel,
) -> Result<f64> {
    spec.check_len(angles.len())?;
    let branch_minus = (-2.0 * spec.n as f64 * spec.alpha_sq()).exp();
    let mut diag = 1.0;
    for &phi in angles {
        diag *= k_diag_with(spec.alpha, phi, kernel);
    }
    Ok(0.5 * (branch_minus + diag))
}

/// The |α| → ∞ reference: a GHZ state gives cos(Σ_k φ_k).
pub fn ghz_limit_correlation(angles: &[f64]) -> f64 {
    angles.iter().sum::<f64>().cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_single_mode() {
        assert!(matches!(
            CatSpec::real(1, 1.0),
            Err(Error::ModeCount(1))
        ));
        assert!(CatSpec::real(2, 1.0).is_ok());
    }

    #[test]
    fn normalization_limits_and_value() {
        let at = |a: f64| normalization(&CatSpec::real(3, a).unwrap());
        assert_abs_diff_eq!(at(0.0), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(at(50.0), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        // frozen: direct evaluation at alpha = 1
        assert_abs_diff_eq!(at(1.0), 0.706232035822280, epsilon = 1e-14);
        // strictly increasing in |alpha|
        let mut prev = at(0.0);
        for k in 1..40 {
            let v = at(k as f64 * 0.1);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn k_diag_trivial_cases() {
        // phi = 0 collapses both kernels to e^{-2|a|^2}
        for a in [0.0, 0.7, 1.3] {
            let al = c(a, 0.0);
            let want = (-2.0 * a * a).exp();
            assert_abs_diff_eq!(k_diag(al, 0.0), want, epsilon = 1e-15);
            assert_abs_diff_eq!(k_diag_literature(al, 0.0), want, epsilon = 1e-15);
        }
        // alpha = 0: every angle gives 1
        assert_abs_diff_eq!(k_diag(c(0.0, 0.0), FRAC_PI_2), 1.0, epsilon = 0.0);
    }

    #[test]
    fn k_diag_frozen_values_at_unit_alpha() {
        // exact kernel value fixed by the Fock oracle; literature kernel value
        // fixed by direct evaluation of its formula
        assert_abs_diff_eq!(
            k_diag(c(1.0, 0.0), FRAC_PI_2),
            -0.130377778883280,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            k_diag_literature(c(1.0, 0.0), FRAC_PI_2),
            -0.098704005459144,
            epsilon = 1e-14
        );
    }

    #[test]
    fn k_offdiag_cases() {
        assert_abs_diff_eq!((k_offdiag(c(2.0, 0.0), 0.0) - c(1.0, 0.0)).norm(), 0.0);
        // alpha large: tends to e^{-i phi}
        let v = k_offdiag(c(40.0, 0.0), 1.1);
        assert_abs_diff_eq!((v - Complex64::from_polar(1.0, -1.1)).norm(), 0.0, epsilon = 1e-15);
        // frozen at alpha = 1, phi = pi/4
        let v = k_offdiag(c(1.0, 0.0), FRAC_PI_4);
        assert_abs_diff_eq!(v.re, 0.712471307615294, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, -0.694155668726560, epsilon = 1e-14);
    }

    #[test]
    fn correlation_cat_examples() {
        let spec0 = CatSpec::real(3, 0.0).unwrap();
        let e0 = correlation_cat(&spec0, &[0.3, -1.2, 2.0]).unwrap();
        assert_abs_diff_eq!(e0, 1.0, epsilon = 0.0);

        // large-alpha limit approaches cos(sum)
        let spec = CatSpec::real(3, 30.0).unwrap();
        let e = correlation_cat(&spec, &[0.0, -FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);

        // frozen by the Fock oracle at truncation 64; Fig-1(d)-style sign
        let spec1 = CatSpec::real(3, 1.0).unwrap();
        let e = correlation_cat(&spec1, &[FRAC_PI_2, FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert_abs_diff_eq!(e, -0.967122509370902, epsilon = 1e-13);
        assert!(e < -0.9);
        let e = correlation_cat(&spec1, &[0.0, -FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert_abs_diff_eq!(e, 0.988480436511923, epsilon = 1e-13);
    }

    #[test]
    fn correlation_mixture_examples() {
        let spec0 = CatSpec::real(3, 0.0).unwrap();
        assert_abs_diff_eq!(
            correlation_mixture(&spec0, &[0.1, 0.2, 0.3]).unwrap(),
            1.0,
            epsilon = 0.0
        );
        let spec2 = CatSpec::real(3, 2.0).unwrap();
        let m = correlation_mixture(&spec2, &[0.0, -FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert!(m.abs() < 1e-3);
        // frozen: direct evaluation at alpha = 1
        let spec1 = CatSpec::real(3, 1.0).unwrap();
        let m = correlation_mixture(&spec1, &[0.0, FRAC_PI_4, -FRAC_PI_4]).unwrap();
        assert_abs_diff_eq!(m, 0.001463177945255, epsilon = 1e-14);
        let m = correlation_mixture_with(
            &spec1,
            &[0.0, FRAC_PI_4, -FRAC_PI_4],
            DiagonalKernel::Literature,
        )
        .unwrap();
        assert_abs_diff_eq!(m, 0.001541205686352, epsilon = 1e-14);
    }

    #[test]
    fn ghz_limit_cases() {
        assert_abs_diff_eq!(ghz_limit_correlation(&[0.0, -FRAC_PI_4, FRAC_PI_4]), 1.0);
        assert_abs_diff_eq!(
            ghz_limit_correlation(&[FRAC_PI_2, FRAC_PI_4, FRAC_PI_4]),
            -1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ghz_limit_correlation(&[0.0, -FRAC_PI_4, -FRAC_PI_4, -FRAC_PI_4]),
            -(2.0f64.sqrt()) / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn phase_invariance_of_cat_correlation() {
        let angles = [0.4, -0.9, 1.7];
        for theta in [PI / 7.0, PI / 3.0, 2.4] {
            let base = CatSpec::real(3, 1.3).unwrap();
            let rot = CatSpec::new(3, Complex64::from_polar(1.3, theta)).unwrap();
            let a = correlation_cat(&base, &angles).unwrap();
            let b = correlation_cat(&rot, &angles).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let spec = CatSpec::real(3, 1.0).unwrap();
        assert!(matches!(
            correlation_cat(&spec, &[0.0, 0.0]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            correlation_mixture(&spec, &[0.0; 4]),
            Err(Error::LengthMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn boundedness_on_a_grid() {
        for n in [3usize, 4, 5] {
            for ai in 0..=20 {
                let spec = CatSpec::real(n, ai as f64 * 0.1).unwrap();
                let angles: Vec<f64> = (0..n).map(|k| (k as f64) * 0.7 - 1.0).collect();
                let e = correlation_cat(&spec, &angles).unwrap();
                let m = correlation_mixture(&spec, &angles).unwrap();
                assert!(e.abs() <= 1.0 + 1e-12, "E out of bounds: {e}");
                assert!(m.abs() <= 1.0 + 1e-12, "mixture out of bounds: {m}");
            }
        }
    }

    #[test]
    fn ghz_limit_agreement_bound() {
        // |E - cos(sum)| <= 5 e^{-2|a|^2} for |a| >= 1.5
        for n in [3usize, 4, 5] {
            for ai in [1.5, 1.75, 2.0, 2.5, 3.0] {
                let spec = CatSpec::real(n, ai).unwrap();
                for s in 0..10 {
                    let angles: Vec<f64> =
                        (0..n).map(|k| ((k + s) as f64 * 0.913).sin() * 2.0).collect();
                    let e = correlation_cat(&spec, &angles).unwrap();
                    let g = ghz_limit_correlation(&angles);
                    assert!(
                        (e - g).abs() <= 5.0 * (-2.0 * ai * ai).exp(),
                        "n={n} a={ai}: |{e} - {g}| too large"
                    );
                }
            }
        }
    }
}
