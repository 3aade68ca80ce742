//! Phase-space route: displaced-parity correlations in closed form.
//!
//! The two-valued observable at phase-space point β is the displaced parity
//! P(β) = D(β) P D†(β), whose expectation is proportional to the Wigner
//! quasiprobability at β. Matrix elements between coherent states follow
//! from the displacement composition rule D(a)D(b) = e^{(ab*−a*b)/2} D(a+b),
//! the reflection P D(β) P = D(−β), and the coherent overlap
//! ⟨u|v⟩ = exp(−|u|²/2 − |v|²/2 + u*v).

use num_complex::Complex64;

use crate::closed_form::{normalization_sq, CatSpec};
use crate::error::{Error, Result};
use crate::mk_expansion::{expand, lhv_bound, SettingChoice, MODE_CAP};

/// Per-mode pairs (β_k, β_k′) of complex displacement settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementAssignment {
    pairs: Vec<(Complex64, Complex64)>,
}

impl DisplacementAssignment {
    pub fn new(pairs: Vec<(Complex64, Complex64)>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Complex64, Complex64)] {
        &self.pairs
    }

    pub fn beta(&self, mode: usize, choice: SettingChoice) -> Complex64 {
        let (u, p) = self.pairs[mode];
        match choice {
            SettingChoice::Unprimed => u,
            SettingChoice::Primed => p,
        }
    }

    /// Flat layout [Re β₁, Im β₁, Re β₁′, Im β₁′, …] used by the optimizer
    /// and the assignment file format.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 4 != 0 || flat.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 4 * (flat.len() / 4).max(1),
                got: flat.len(),
            });
        }
        let pairs = flat
            .chunks_exact(4)
            .map(|c| {
                (
                    Complex64::new(c[0], c[1]),
                    Complex64::new(c[2], c[3]),
                )
            })
            .collect();
        Ok(Self { pairs })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.pairs.len());
        for (u, p) in &self.pairs {
            out.extend_from_slice(&[u.re, u.im, p.re, p.im]);
        }
        out
    }
}

/// ⟨γ| D(β) P D†(β) |δ⟩ in closed form.
///
/// Special cases: γ = δ gives e^{−2|γ−β|²}; β = γ = δ gives 1.
pub fn coherent_displaced_parity_element(
    gamma: Complex64,
    delta: Complex64,
    beta: Complex64,
) -> Complex64 {
    let exponent = (beta * gamma.conj() - beta.conj() * gamma) / 2.0
        + (beta.conj() * delta - beta * delta.conj()) / 2.0
        - Complex64::new((gamma - beta).norm_sqr() / 2.0, 0.0)
        - Complex64::new((beta - delta).norm_sqr() / 2.0, 0.0)
        + (gamma - beta).conj() * (beta - delta);
    exponent.exp()
}

/// Displaced-parity correlation over the two-branch cat state:
/// N_n² [ Π⟨α|P(β_k)|α⟩ + Π⟨−α|P(β_k)|−α⟩ + 2 Re Π⟨α|P(β_k)|−α⟩ ].
pub fn correlation_displaced(spec: &CatSpec, betas: &[Complex64]) -> Result<f64> {
    if betas.len() != spec.mode_count() {
        return Err(Error::LengthMismatch {
            expected: spec.mode_count(),
            got: betas.len(),
        });
    }
    let a = spec.alpha();
    let mut pp = Complex64::new(1.0, 0.0);
    let mut mm = Complex64::new(1.0, 0.0);
    let mut pm = Complex64::new(1.0, 0.0);
    for &b in betas {
        pp *= coherent_displaced_parity_element(a, a, b);
        mm *= coherent_displaced_parity_element(-a, -a, b);
        pm *= coherent_displaced_parity_element(a, -a, b);
    }
    Ok(normalization_sq(spec) * (pp.re + mm.re + 2.0 * pm.re))
}

/// The displacement schedule that attains the GHZ limit as α → ∞:
/// β₁ = 0, β₁′ = iπ/(8α), β_k = −iπ/(16α), β_k′ = iπ/(16α) for k > 1.
pub fn ghz_limit_beta_schedule(alpha: f64, n: usize) -> Result<DisplacementAssignment> {
    if n < 2 {
        return Err(Error::ModeCount(n));
    }
    if !(alpha > 0.0) {
        return Err(Error::ZeroAlpha);
    }
    let i = Complex64::new(0.0, 1.0);
    let mut pairs = vec![(
        Complex64::new(0.0, 0.0),
        i * (std::f64::consts::PI / (8.0 * alpha)),
    )];
    let step = i * (std::f64::consts::PI / (16.0 * alpha));
    pairs.extend(std::iter::repeat((-step, step)).take(n - 1));
    Ok(DisplacementAssignment::new(pairs))
}

/// Signed sum Σ c_i · E(β-tuple_i) under the shared per-level 1/√2
/// recursion convention. The MK signal is its absolute value.
pub fn displaced_signal_sum(spec: &CatSpec, assign: &DisplacementAssignment) -> Result<f64> {
    displaced_sum_from(spec.mode_count(), assign, |betas| {
        correlation_displaced(spec, betas)
    })
}

/// Same contraction for an arbitrary per-tuple correlation engine.
pub fn displaced_sum_from<F>(
    n: usize,
    assign: &DisplacementAssignment,
    mut correlation: F,
) -> Result<f64>
where
    F: FnMut(&[Complex64]) -> Result<f64>,
{
    if assign.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: assign.len(),
        });
    }
    if n > MODE_CAP {
        return Err(Error::ModeCountCap {
            got: n,
            cap: MODE_CAP,
        });
    }
    let exp = expand(n)?;
    let mut total = 0.0;
    let mut betas = vec![Complex64::new(0.0, 0.0); n];
    for (coeff, pat) in exp.terms() {
        for (mode, &tag) in pat.iter().enumerate() {
            betas[mode] = assign.beta(mode, tag);
        }
        total += coeff.value() * correlation(&betas)?;
    }
    Ok(total)
}

/// Displaced-parity MK signal |Σ c_i E_i| (shared 1/√2 convention, so the
/// LHV bound is the same D_n as for the rotated signal).
pub fn mk_signal_displaced(spec: &CatSpec, assign: &DisplacementAssignment) -> Result<f64> {
    Ok(displaced_signal_sum(spec, assign)?.abs())
}

/// No-prefactor recursion variant: multiplies the shared-convention signal
/// by 2^{(n−1)/2}. Kept for comparison with analyses that print the
/// recursion without the per-level 1/√2.
pub fn mk_signal_displaced_plain(spec: &CatSpec, assign: &DisplacementAssignment) -> Result<f64> {
    Ok(mk_signal_displaced(spec, assign)? * lhv_bound(spec.mode_count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn element_special_cases() {
        // centered parity
        let g = c(0.7, -0.3);
        let e = coherent_displaced_parity_element(g, g, g);
        assert_abs_diff_eq!((e - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        // gamma = delta gives e^{-2|gamma - beta|^2}
        let b = c(-0.2, 0.4);
        let e = coherent_displaced_parity_element(g, g, b);
        assert_abs_diff_eq!(e.re, (-2.0 * (g - b).norm_sqr()).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-15);
        // beta = 0 between opposite branches reduces to <gamma|gamma> = 1
        let e = coherent_displaced_parity_element(g, -g, c(0.0, 0.0));
        assert_abs_diff_eq!((e - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn correlation_at_origin_is_exactly_one() {
        // the cat state is a +1 eigenstate of the total parity
        for (n, a) in [(2usize, 0.3), (3, 1.0), (4, 2.0), (3, 0.0)] {
            let spec = CatSpec::real(n, a).unwrap();
            let zeros = vec![c(0.0, 0.0); n];
            assert_abs_diff_eq!(
                correlation_displaced(&spec, &zeros).unwrap(),
                1.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn correlation_length_mismatch() {
        let spec = CatSpec::real(3, 1.0).unwrap();
        assert!(matches!(
            correlation_displaced(&spec, &[c(0.0, 0.0)]),
            Err(Error::LengthMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn schedule_values() {
        let s = ghz_limit_beta_schedule(1.0, 3).unwrap();
        let pi = std::f64::consts::PI;
        assert_eq!(s.pairs()[0].0, c(0.0, 0.0));
        assert_abs_diff_eq!(s.pairs()[0].1.im, pi / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.pairs()[1].0.im, -pi / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.pairs()[2].1.im, pi / 16.0, epsilon = 1e-15);
        // 1/alpha scaling
        let s2 = ghz_limit_beta_schedule(2.0, 3).unwrap();
        assert_abs_diff_eq!(s2.pairs()[0].1.im, pi / 16.0, epsilon = 1e-15);
        // formula instantiation at n = 4, alpha = 4
        let s4 = ghz_limit_beta_schedule(4.0, 4).unwrap();
        assert_abs_diff_eq!(s4.pairs()[0].1.im, pi / 32.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s4.pairs()[3].0.im, -pi / 64.0, epsilon = 1e-15);
        assert!(matches!(
            ghz_limit_beta_schedule(0.0, 3),
            Err(Error::ZeroAlpha)
        ));
    }

    #[test]
    fn schedule_signal_frozen_values() {
        // frozen by direct evaluation, cross-checked against the Fock oracle
        for (alpha, want) in [
            (1.0, 2.970307390412),
            (2.0, 3.705918236212),
            (4.0, 3.923814383007),
            (8.0, 3.980781358903),
        ] {
            let spec = CatSpec::real(3, alpha).unwrap();
            let assign = ghz_limit_beta_schedule(alpha, 3).unwrap();
            assert_abs_diff_eq!(
                mk_signal_displaced(&spec, &assign).unwrap(),
                want,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn degenerate_assignment_sits_at_the_classical_bound() {
        // beta = beta' = 0 for every mode: every correlation is 1, the
        // signal telescopes to exactly the LHV bound value 2 for n = 3
        let spec = CatSpec::real(3, 0.2).unwrap();
        let zeros = DisplacementAssignment::new(vec![(c(0.0, 0.0), c(0.0, 0.0)); 3]);
        assert_abs_diff_eq!(
            mk_signal_displaced(&spec, &zeros).unwrap(),
            2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn plain_variant_rescales_by_the_bound() {
        let spec = CatSpec::real(3, 1.0).unwrap();
        let assign = ghz_limit_beta_schedule(1.0, 3).unwrap();
        let shared = mk_signal_displaced(&spec, &assign).unwrap();
        let plain = mk_signal_displaced_plain(&spec, &assign).unwrap();
        assert_abs_diff_eq!(plain, shared * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn flat_round_trip() {
        let assign = ghz_limit_beta_schedule(1.7, 4).unwrap();
        let flat = assign.to_flat();
        assert_eq!(flat.len(), 16);
        let back = DisplacementAssignment::from_flat(&flat).unwrap();
        assert_eq!(back, assign);
        assert!(DisplacementAssignment::from_flat(&[1.0; 5]).is_err());
    }
}
