//! The Mermin-Klyshko operator as an exact weighted sum of per-mode settings.
//!
//! The operator is built recursively from two-valued observables with two
//! settings per mode,
//!
//! ```text
//! O_1 = σ_{1,a₁},
//! O_k = (1/√2) [ O_{k−1} (σ_k + σ_k′) + O_{k−1}′ (σ_k − σ_k′) ],
//! ```
//!
//! where the primed operator swaps every setting tag. Expanding and merging
//! like terms yields coefficients in the ring ℤ[1/√2], represented exactly
//! by [`DyadicRootCoefficient`]. Under any deterministic ±1 assignment the
//! expansion evaluates to exactly ±2^{(n−1)/2}, the local-hidden-variable
//! bound D_n.

use crate::closed_form::{correlation_cat_with, CatSpec, DiagonalKernel};
use crate::error::{Error, Result};

/// Hard cap on enumeration-based checks (2^{2n} assignments) and on the
/// expansion-driven signal evaluation (2^{n−1} terms).
pub const MODE_CAP: usize = 8;

/// Which of the two settings a mode uses in one term of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SettingChoice {
    Unprimed,
    Primed,
}

impl SettingChoice {
    pub fn is_primed(self) -> bool {
        matches!(self, SettingChoice::Primed)
    }

    fn swapped(self) -> Self {
        match self {
            SettingChoice::Unprimed => SettingChoice::Primed,
            SettingChoice::Primed => SettingChoice::Unprimed,
        }
    }
}

/// Exact coefficient m·2^{−p/2} with m a signed integer and p ≥ 0.
///
/// Canonical form divides out factors of 2: while m is even and p ≥ 2,
/// (m, p) → (m/2, p−2). Addition and scaling by 1/√2 stay in the ring with
/// zero rounding; `value` is the only lossy conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRootCoefficient {
    m: i64,
    p: u32,
}

impl DyadicRootCoefficient {
    pub const ZERO: Self = Self { m: 0, p: 0 };

    pub fn new(m: i64, p: u32) -> Self {
        Self { m, p }.canonical()
    }

    /// The value 2^{k/2} for k ≥ 0.
    pub fn sqrt2_power(k: u32) -> Self {
        Self::new(1i64 << ((k + 1) / 2), k & 1)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn canonical(mut self) -> Self {
        if self.m == 0 {
            return Self::ZERO;
        }
        while self.m % 2 == 0 && self.p >= 2 {
            self.m /= 2;
            self.p -= 2;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0
    }

    pub fn neg(self) -> Self {
        Self {
            m: -self.m,
            p: self.p,
        }
    }

    pub fn abs(self) -> Self {
        Self {
            m: self.m.abs(),
            p: self.p,
        }
    }

    /// Exact sum, if both terms live in the same radical class (p parities
    /// agree, or one term is zero).
    pub fn checked_add(self, other: Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other);
        }
        if other.is_zero() {
            return Some(self);
        }
        if (self.p ^ other.p) & 1 != 0 {
            return None;
        }
        let p = self.p.max(other.p);
        let a = self.m << ((p - self.p) / 2);
        let b = other.m << ((p - other.p) / 2);
        Some(Self::new(a + b, p))
    }

    /// Multiply by 1/√2 (one recursion level).
    pub fn div_sqrt2(self) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.m, self.p + 1)
        }
    }

    pub fn scale_int(self, k: i64) -> Self {
        Self::new(self.m * k, self.p)
    }

    pub fn value(&self) -> f64 {
        let halves = (self.p / 2) as i32;
        let mut v = self.m as f64 / f64::powi(2.0, halves);
        if self.p & 1 == 1 {
            v *= std::f64::consts::FRAC_1_SQRT_2;
        }
        v
    }

    /// Exact total order on the represented values.
    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        // compare m1 * 2^{-p1/2} vs m2 * 2^{-p2/2} via sign and squared
        // magnitude; squares are exact in i128 for the sizes reached here.
        let s1 = self.m.signum();
        let s2 = other.m.signum();
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        let q1 = (self.m as i128) * (self.m as i128);
        let q2 = (other.m as i128) * (other.m as i128);
        let p = self.p.max(other.p);
        let q1 = q1 << (p - self.p);
        let q2 = q2 << (p - other.p);
        if s1 >= 0 {
            q1.cmp(&q2)
        } else {
            q2.cmp(&q1)
        }
    }
}

/// Per-mode pairs (φ_k, φ_k′) of rotation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleAssignment {
    pairs: Vec<(f64, f64)>,
}

impl AngleAssignment {
    pub fn new(pairs: Vec<(f64, f64)>) -> Self {
        Self { pairs }
    }

    /// φ₁ = 0, φ₁′ = π/2 and φ_k = −π/4, φ_k′ = π/4 for k > 1.
    pub fn standard(n: usize) -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        let mut pairs = vec![(0.0, FRAC_PI_2)];
        pairs.extend(std::iter::repeat((-FRAC_PI_4, FRAC_PI_4)).take(n.saturating_sub(1)));
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn angle(&self, mode: usize, choice: SettingChoice) -> f64 {
        let (u, p) = self.pairs[mode];
        match choice {
            SettingChoice::Unprimed => u,
            SettingChoice::Primed => p,
        }
    }
}

/// Merged expansion of O_n: exact coefficients on setting-tag vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MKExpansion {
    n: usize,
    terms: Vec<(DyadicRootCoefficient, Vec<SettingChoice>)>,
    merged: bool,
}

/// Expand O_n by the recursion and merge like terms.
///
/// The prime-swapped O_n′ is carried through the recursion internally.
pub fn expand(n: usize) -> Result<MKExpansion> {
    if n < 2 {
        return Err(Error::ModeCount(n));
    }
    // coefficients at recursion level k share the uniform scale 2^{-(k-1)/2};
    // track the integer parts and attach the scale at the end.
    use std::collections::BTreeMap;
    let mut terms: BTreeMap<Vec<SettingChoice>, i64> = BTreeMap::new();
    terms.insert(vec![SettingChoice::Unprimed], 1);
    for _ in 2..=n {
        let swapped = |pat: &[SettingChoice]| -> Vec<SettingChoice> {
            pat.iter().map(|t| t.swapped()).collect()
        };
        let mut next: BTreeMap<Vec<SettingChoice>, i64> = BTreeMap::new();
        let mut keys: Vec<Vec<SettingChoice>> = terms.keys().cloned().collect();
        keys.extend(terms.keys().map(|k| swapped(k)));
        keys.sort();
        keys.dedup();
        for pat in keys {
            let c = terms.get(&pat).copied().unwrap_or(0);
            let c_swapped = terms.get(&swapped(&pat)).copied().unwrap_or(0);
            for (tag, m) in [
                (SettingChoice::Unprimed, c + c_swapped),
                (SettingChoice::Primed, c - c_swapped),
            ] {
                if m != 0 {
                    let mut key = pat.clone();
                    key.push(tag);
                    next.insert(key, m);
                }
            }
        }
        terms = next;
    }
    let scale = (n - 1) as u32;
    let terms = terms
        .into_iter()
        .map(|(pat, m)| (DyadicRootCoefficient::new(m, scale), pat))
        .collect();
    Ok(MKExpansion {
        n,
        terms,
        merged: true,
    })
}

impl MKExpansion {
    pub fn mode_count(&self) -> usize {
        self.n
    }

    pub fn merged(&self) -> bool {
        self.merged
    }

    pub fn terms(&self) -> &[(DyadicRootCoefficient, Vec<SettingChoice>)] {
        &self.terms
    }

    /// Exact value of the expansion under a deterministic ±1 assignment,
    /// given per mode as (unprimed value, primed value).
    pub fn evaluate_assignment(&self, values: &[(i8, i8)]) -> Result<DyadicRootCoefficient> {
        if values.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: values.len(),
            });
        }
        let mut total = DyadicRootCoefficient::ZERO;
        for (coeff, pat) in &self.terms {
            let mut sign = 1i64;
            for (mode, tag) in pat.iter().enumerate() {
                let v = match tag {
                    SettingChoice::Unprimed => values[mode].0,
                    SettingChoice::Primed => values[mode].1,
                };
                sign *= v as i64;
            }
            total = total
                .checked_add(coeff.scale_int(sign))
                .expect("expansion terms share one radical class");
        }
        Ok(total)
    }

    /// Substitute concrete angles for the tags and merge terms whose angle
    /// tuples coincide after sorting the angles of modes 2..n (those modes
    /// share one setting pair, so the correlation is symmetric under their
    /// permutation). Coefficients become floats only at this boundary.
    pub fn assign_angles(&self, assign: &AngleAssignment) -> Result<Vec<(f64, Vec<f64>)>> {
        if assign.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: assign.len(),
            });
        }
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<Vec<u64>, (DyadicRootCoefficient, Vec<f64>)> = BTreeMap::new();
        for (coeff, pat) in &self.terms {
            let mut angles: Vec<f64> = pat
                .iter()
                .enumerate()
                .map(|(mode, &tag)| assign.angle(mode, tag))
                .collect();
            angles[1..].sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
            let key: Vec<u64> = angles.iter().map(|a| a.to_bits()).collect();
            groups
                .entry(key)
                .and_modify(|(c, _)| {
                    *c = c
                        .checked_add(*coeff)
                        .expect("expansion terms share one radical class")
                })
                .or_insert_with(|| (*coeff, angles));
        }
        Ok(groups
            .into_values()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, angles)| (c.value(), angles))
            .collect())
    }

    /// Raw view: every stored term as (float coefficient, angle tuple)
    /// without the symmetry merge. This is the printed-form layout of the
    /// three-mode operator.
    pub fn assign_angles_unmerged(&self, assign: &AngleAssignment) -> Result<Vec<(f64, Vec<f64>)>> {
        if assign.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: assign.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(coeff, pat)| {
                let angles = pat
                    .iter()
                    .enumerate()
                    .map(|(mode, &tag)| assign.angle(mode, tag))
                    .collect();
                (coeff.value(), angles)
            })
            .collect())
    }
}

/// Local-hidden-variable bound D_n = 2^{(n−1)/2}.
pub fn lhv_bound(n: usize) -> f64 {
    DyadicRootCoefficient::sqrt2_power((n - 1) as u32).value()
}

/// Brute-force maximum of |expansion value| over all 2^{2n} deterministic
/// ±1 assignments. Equals 2^{(n−1)/2} exactly.
pub fn lhv_bound_check(exp: &MKExpansion) -> Result<f64> {
    let n = exp.mode_count();
    if n > MODE_CAP {
        return Err(Error::ModeCountCap {
            got: n,
            cap: MODE_CAP,
        });
    }
    let mut best = DyadicRootCoefficient::ZERO;
    let mut values = vec![(1i8, 1i8); n];
    for bits in 0u32..(1u32 << (2 * n)) {
        for (mode, v) in values.iter_mut().enumerate() {
            v.0 = if bits >> (2 * mode) & 1 == 0 { 1 } else { -1 };
            v.1 = if bits >> (2 * mode + 1) & 1 == 0 { 1 } else { -1 };
        }
        let v = exp.evaluate_assignment(&values)?.abs();
        if best.cmp_value(&v) == std::cmp::Ordering::Less {
            best = v;
        }
    }
    Ok(best.value())
}

/// MK signal from an arbitrary per-tuple correlation function: expands O_n,
/// applies the standard angle assignment, and returns |Σ c_i · f(angles_i)|.
pub fn mk_signal_from<F>(n: usize, mut correlation: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if n > MODE_CAP {
        return Err(Error::ModeCountCap {
            got: n,
            cap: MODE_CAP,
        });
    }
    let exp = expand(n)?;
    let grouped = exp.assign_angles(&AngleAssignment::standard(n))?;
    let mut total = 0.0;
    for (c, angles) in &grouped {
        total += c * correlation(angles)?;
    }
    Ok(total.abs())
}

/// Rotated-parity MK signal S_n at the standard angle assignment.
pub fn mk_signal_rotated(spec: &CatSpec) -> Result<f64> {
    mk_signal_rotated_with(spec, DiagonalKernel::Exact)
}

pub fn mk_signal_rotated_with(spec: &CatSpec, kernel: DiagonalKernel) -> Result<f64> {
    mk_signal_from(spec.mode_count(), |angles| {
        correlation_cat_with(spec, angles, kernel)
    })
}

/// Rescaled signal R_n = S_n / D_n; R_n > 1 certifies an MK violation.
pub fn rescaled_signal(spec: &CatSpec) -> Result<f64> {
    rescaled_signal_with(spec, DiagonalKernel::Exact)
}

pub fn rescaled_signal_with(spec: &CatSpec, kernel: DiagonalKernel) -> Result<f64> {
    Ok(mk_signal_rotated_with(spec, kernel)? / lhv_bound(spec.mode_count()))
}
