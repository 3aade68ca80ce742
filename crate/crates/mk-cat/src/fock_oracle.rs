//! Independent numerical oracle on a truncated Fock space.
//!
//! Every single-mode operator is a dense `dim × dim` complex matrix in the
//! quantum-number basis {|0⟩, …, |dim−1⟩}: displacement D(β) = exp(βa† − β*a)
//! by scaling-and-squaring of the (exactly anti-Hermitian) truncated
//! generator, parity P = diag((−1)^m), the vacuum phase gate
//! G(φ) = diag(e^{iφ}, 1, 1, …), the rotated parity
//! σ(φ) = R_z(φ) P R_z†(φ) with R_z(φ) = D†(α) G(φ) D(α), and the displaced
//! parity P(β) = D(β) P D†(β).
//!
//! Correlations over the two-branch cat state factorize mode by mode
//! ([`branch_expectation`]), which avoids `dim^n` state vectors; the n ≤ 3
//! [`full_tensor_expectation`] builds the full tensor product anyway as an
//! independent cross-check of that factorization. None of the closed forms
//! from the rest of the crate enter here.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::closed_form::CatSpec;
use crate::error::{Error, Result};

pub type ModeVector = Array1<Complex64>;
pub type ModeMatrix = Array2<Complex64>;

/// Fock-space truncation: number of retained basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    dim: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { dim: Self::DEFAULT_DIM }
    }
}

impl Truncation {
    /// Covers every amplitude ≤ 4 with tail mass below 1e−12.
    pub const DEFAULT_DIM: usize = 64;

    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Tail-mass heuristic: dim ≥ ⌈a² + 8a + 16⌉ for amplitude a.
    pub fn required_dim(amplitude: f64) -> usize {
        let a = amplitude.abs();
        (a * a + 8.0 * a + 16.0).ceil() as usize
    }

    pub fn ensure_adequate(&self, amplitude: f64) -> Result<()> {
        let required = Self::required_dim(amplitude);
        if self.dim < required {
            return Err(Error::TruncationInadequate {
                dim: self.dim,
                amplitude: amplitude.abs(),
                required,
            });
        }
        Ok(())
    }
}

fn adjoint(m: &ModeMatrix) -> ModeMatrix {
    m.t().mapv(|z| z.conj())
}

fn one_norm(m: &ModeMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn hermiticity_residual(m: &ModeMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// exp(A) by scaling-and-squaring with a Taylor inner loop.
fn matrix_exp(generator: &ModeMatrix) -> ModeMatrix {
    let dim = generator.nrows();
    let norm = one_norm(generator);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 2.0f64.powi(squarings as i32);
    let scaled = generator.mapv(|z| z / scale);
    let mut result: ModeMatrix = Array2::eye(dim);
    let mut term: ModeMatrix = Array2::eye(dim);
    for k in 1..=48u32 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        let term_norm = one_norm(&term);
        result = result + &term;
        if term_norm < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Coherent state coefficients c_m = e^{−|α|²/2} α^m / √(m!).
///
/// Fails (reporting the required dim) when the retained tail mass deviates
/// from 1 by more than 1e−12.
pub fn coherent_vector(alpha: Complex64, t: Truncation) -> Result<ModeVector> {
    t.ensure_adequate(alpha.norm())?;
    let dim = t.dim();
    let mut c = Array1::zeros(dim);
    c[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for m in 1..dim {
        c[m] = c[m - 1] * alpha / (m as f64).sqrt();
    }
    let mass: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (1.0 - mass).abs() > 1e-12 {
        return Err(Error::TruncationInadequate {
            dim,
            amplitude: alpha.norm(),
            required: Truncation::required_dim(alpha.norm()),
        });
    }
    Ok(c)
}

/// D(β) = exp(βa† − β*a) on the truncated space.
///
/// The truncated generator stays anti-Hermitian, so the exponential is
/// unitary up to floating error; the low-subspace orthonormality contract
/// (columns 0..dim/2) is still verified at construction, since that is the
/// region callers rely on.
pub fn displacement_matrix(beta: Complex64, t: Truncation) -> Result<ModeMatrix> {
    t.ensure_adequate(beta.norm())?;
    let dim = t.dim();
    let mut generator: ModeMatrix = Array2::zeros((dim, dim));
    for m in 1..dim {
        let root = (m as f64).sqrt();
        generator[(m, m - 1)] = beta * root; // beta a†
        generator[(m - 1, m)] = -beta.conj() * root; // −beta* a
    }
    let d = matrix_exp(&generator);
    let half = dim / 2;
    for i in 0..=half.min(dim - 1) {
        for j in i..=half.min(dim - 1) {
            let dot: Complex64 = (0..dim).map(|r| d[(r, i)].conj() * d[(r, j)]).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - Complex64::new(expected, 0.0)).norm() > 1e-8 {
                return Err(Error::TruncationInadequate {
                    dim,
                    amplitude: beta.norm(),
                    required: Truncation::required_dim(beta.norm()),
                });
            }
        }
    }
    Ok(d)
}

/// P = diag((−1)^m). Involutory exactly: P² = I.
pub fn parity_matrix(t: Truncation) -> ModeMatrix {
    let dim = t.dim();
    let mut p: ModeMatrix = Array2::zeros((dim, dim));
    for m in 0..dim {
        p[(m, m)] = Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    p
}

/// G(φ) = diag(e^{iφ}, 1, 1, …): a phase on the vacuum only.
pub fn phase_gate_matrix(phi: f64, t: Truncation) -> ModeMatrix {
    let dim = t.dim();
    let mut g: ModeMatrix = Array2::zeros((dim, dim));
    g[(0, 0)] = Complex64::from_polar(1.0, phi);
    for m in 1..dim {
        g[(m, m)] = Complex64::new(1.0, 0.0);
    }
    g
}

/// σ(φ) = R_z(φ) P R_z†(φ) with R_z(φ) = D†(α) G(φ) D(α).
pub fn rotated_parity_matrix(alpha: Complex64, phi: f64, t: Truncation) -> Result<ModeMatrix> {
    t.ensure_adequate(2.0 * alpha.norm())?;
    let d = displacement_matrix(alpha, t)?;
    let g = phase_gate_matrix(phi, t);
    let r = adjoint(&d).dot(&g).dot(&d);
    let sigma = r.dot(&parity_matrix(t)).dot(&adjoint(&r));
    let residual = hermiticity_residual(&sigma);
    if residual > 1e-12 {
        return Err(Error::NonHermitian { residual });
    }
    Ok(sigma)
}

/// P(β) = D(β) P D†(β); ⟨γ|P(β)|γ⟩ = e^{−2|γ−β|²}.
pub fn displaced_parity_matrix(beta: Complex64, t: Truncation) -> Result<ModeMatrix> {
    let d = displacement_matrix(beta, t)?;
    let p = d.dot(&parity_matrix(t)).dot(&adjoint(&d));
    let residual = hermiticity_residual(&p);
    if residual > 1e-12 {
        return Err(Error::NonHermitian { residual });
    }
    Ok(p)
}

fn sandwich(bra: &ModeVector, m: &ModeMatrix, ket: &ModeVector) -> Complex64 {
    let mk = m.dot(ket);
    bra.iter().zip(mk.iter()).map(|(b, x)| b.conj() * x).sum()
}

fn branch_products(
    spec: &CatSpec,
    ops: &[ModeMatrix],
) -> Result<(Complex64, Complex64, Complex64)> {
    if ops.len() != spec.mode_count() {
        return Err(Error::LengthMismatch {
            expected: spec.mode_count(),
            got: ops.len(),
        });
    }
    let dim = ops[0].nrows();
    for m in ops {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::InvalidArgument(
                "per-mode operators must share one square dimension".into(),
            ));
        }
        let residual = hermiticity_residual(m);
        if residual > 1e-8 {
            return Err(Error::NonHermitian { residual });
        }
    }
    let t = Truncation::new(dim);
    let kp = coherent_vector(spec.alpha(), t)?;
    let km = coherent_vector(-spec.alpha(), t)?;
    let mut pp = Complex64::new(1.0, 0.0);
    let mut mm = Complex64::new(1.0, 0.0);
    let mut pm = Complex64::new(1.0, 0.0);
    for m in ops {
        pp *= sandwich(&kp, m, &kp);
        mm *= sandwich(&km, m, &km);
        pm *= sandwich(&kp, m, &km);
    }
    Ok((pp, mm, pm))
}

/// Expectation of a product of per-mode Hermitian operators over the cat
/// state, via the two-branch factorization:
/// N_n² [Π⟨α|M|α⟩ + Π⟨−α|M|−α⟩ + 2 Re Π⟨α|M|−α⟩].
pub fn branch_expectation(spec: &CatSpec, ops: &[ModeMatrix]) -> Result<f64> {
    let (pp, mm, pm) = branch_products(spec, ops)?;
    debug_assert!(pp.im.abs() < 1e-10 && mm.im.abs() < 1e-10);
    Ok(crate::closed_form::normalization_sq(spec) * (pp.re + mm.re + 2.0 * pm.re))
}

/// Same factorization for the equally-weighted classical mixture of the two
/// branch products: (1/2)[Π⟨α|M|α⟩ + Π⟨−α|M|−α⟩].
pub fn mixture_expectation(spec: &CatSpec, ops: &[ModeMatrix]) -> Result<f64> {
    let (pp, mm, _) = branch_products(spec, ops)?;
    Ok(0.5 * (pp.re + mm.re))
}

fn kron_vec(factors: &[&ModeVector]) -> Array1<Complex64> {
    let mut out = Array1::from_elem(1, Complex64::new(1.0, 0.0));
    for v in factors {
        let mut next = Array1::zeros(out.len() * v.len());
        for (i, x) in out.iter().enumerate() {
            for (j, y) in v.iter().enumerate() {
                next[i * v.len() + j] = x * y;
            }
        }
        out = next;
    }
    out
}

fn apply_axis(
    state: &Array1<Complex64>,
    m: &ModeMatrix,
    axis: usize,
    dim: usize,
    modes: usize,
) -> Array1<Complex64> {
    let stride = dim.pow((modes - 1 - axis) as u32);
    let outer = dim.pow(axis as u32);
    let mut out = Array1::zeros(state.len());
    let mut fiber = vec![Complex64::new(0.0, 0.0); dim];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * dim * stride + inner;
            for (i, f) in fiber.iter_mut().enumerate() {
                *f = state[base + i * stride];
            }
            for i in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, f) in fiber.iter().enumerate() {
                    acc += m[(i, j)] * f;
                }
                out[base + i * stride] = acc;
            }
        }
    }
    out
}

/// Full tensor-product evaluation of the same expectation, n ≤ 3 only.
/// Exists purely to cross-check the factorized route.
pub fn full_tensor_expectation(
    spec: &CatSpec,
    ops: &[ModeMatrix],
    t: Truncation,
) -> Result<f64> {
    let n = spec.mode_count();
    if n > 3 {
        return Err(Error::InvalidArgument(format!(
            "full tensor route is capped at 3 modes, got {n}"
        )));
    }
    if ops.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: ops.len(),
        });
    }
    let dim = t.dim();
    for m in ops {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::InvalidArgument(
                "operator dimension does not match the truncation".into(),
            ));
        }
    }
    let kp = coherent_vector(spec.alpha(), t)?;
    let km = coherent_vector(-spec.alpha(), t)?;
    let plus = kron_vec(&vec![&kp; n]);
    let minus = kron_vec(&vec![&km; n]);
    let norm = crate::closed_form::normalization(spec);
    let mut psi = Array1::zeros(plus.len());
    for i in 0..plus.len() {
        psi[i] = (plus[i] + minus[i]) * norm;
    }
    let mut acted = psi.clone();
    for (axis, m) in ops.iter().enumerate() {
        acted = apply_axis(&acted, m, axis, dim, n);
    }
    let value: Complex64 = psi.iter().zip(acted.iter()).map(|(a, b)| a.conj() * b).sum();
    debug_assert!(value.im.abs() < 1e-10);
    Ok(value.re)
}

/// Rotated-parity correlation evaluated entirely with dense matrices.
pub fn oracle_correlation_rotated(
    spec: &CatSpec,
    angles: &[f64],
    t: Truncation,
) -> Result<f64> {
    if angles.len() != spec.mode_count() {
        return Err(Error::LengthMismatch {
            expected: spec.mode_count(),
            got: angles.len(),
        });
    }
    let ops = angles
        .iter()
        .map(|&phi| rotated_parity_matrix(spec.alpha(), phi, t))
        .collect::<Result<Vec<_>>>()?;
    branch_expectation(spec, &ops)
}

/// Displaced-parity correlation evaluated entirely with dense matrices.
pub fn oracle_correlation_displaced(
    spec: &CatSpec,
    betas: &[Complex64],
    t: Truncation,
) -> Result<f64> {
    if betas.len() != spec.mode_count() {
        return Err(Error::LengthMismatch {
            expected: spec.mode_count(),
            got: betas.len(),
        });
    }
    let reach = spec.alpha().norm() + betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
    t.ensure_adequate(reach)?;
    let ops = betas
        .iter()
        .map(|&b| displaced_parity_matrix(b, t))
        .collect::<Result<Vec<_>>>()?;
    branch_expectation(spec, &ops)
}
