//! Truncated states on a fixed-imbalance pair ladder `{|p+s, s⟩ : s ∈ ℕ}`.
//!
//! A [`LadderState`] stores amplitudes `c_0..=c_smax`. The `mirror` flag
//! selects the partner ladder `{|s, p+s⟩}`; every operator in this crate is
//! symmetric under exchanging the two species, so the flag only matters for
//! orthogonality. For `p = 0` both ladders coincide and the flag is cleared.

use num_complex::Complex64;
use serde::Serialize;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderState {
    p: usize,
    mirror: bool,
    coeffs: Vec<C64>,
}

impl LadderState {
    pub fn new(p: usize, mirror: bool, coeffs: Vec<C64>) -> Self {
        Self { p, mirror: mirror && p > 0, coeffs }
    }

    pub fn from_real(p: usize, coeffs: &[f64]) -> Self {
        Self::new(p, false, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// `|p + s, s⟩`.
    pub fn basis(p: usize, s: usize, smax: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); smax.max(s) + 1];
        coeffs[s] = C64::new(1.0, 0.0);
        Self::new(p, false, coeffs)
    }

    pub fn zeros(p: usize, mirror: bool, len: usize) -> Self {
        Self::new(p, mirror, vec![C64::new(0.0, 0.0); len])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn mirror(&self) -> bool {
        self.mirror
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest stored index, `None` for the empty (zero) state.
    pub fn smax(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient at `s`, zero beyond the stored range.
    pub fn get(&self, s: usize) -> C64 {
        self.coeffs.get(s).copied().unwrap_or_default()
    }

    pub fn same_ladder(&self, other: &Self) -> bool {
        self.p == other.p && self.mirror == other.mirror
    }

    pub fn with_mirror(mut self, mirror: bool) -> Self {
        self.mirror = mirror && self.p > 0;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect(), ..self.clone() }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    /// Truncate or zero-pad to `len` coefficients.
    pub fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, C64::new(0.0, 0.0));
        Self { coeffs, ..self.clone() }
    }

    /// `self + k * other`, padded to the longer range. Both must share a ladder.
    pub fn axpy(&self, k: C64, other: &Self) -> Self {
        debug_assert!(self.same_ladder(other));
        let n = self.len().max(other.len());
        let coeffs = (0..n).map(|s| self.get(s) + k * other.get(s)).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Largest `|c_s - d_s|` over the union of stored ranges.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|s| (self.get(s) - other.get(s)).norm()).fold(0.0, f64::max)
    }
}

/// `ab`: `c'_s = sqrt((p+s+1)(s+1)) c_{s+1}`, one index shorter.
pub fn apply_ab(st: &LadderState) -> LadderState {
    let p = st.p as f64;
    let coeffs = (1..st.len())
        .map(|t| {
            let s = (t - 1) as f64;
            st.coeffs[t] * ((p + s + 1.0) * (s + 1.0)).sqrt()
        })
        .collect();
    LadderState { coeffs, ..st.clone() }
}

/// `a*b*`: `c'_s = sqrt((p+s) s) c_{s-1}`, one index longer.
pub fn apply_adbd(st: &LadderState) -> LadderState {
    if st.is_empty() {
        return st.clone();
    }
    let p = st.p as f64;
    let mut coeffs = Vec::with_capacity(st.len() + 1);
    coeffs.push(C64::new(0.0, 0.0));
    for (s0, c) in st.coeffs.iter().enumerate() {
        let s = (s0 + 1) as f64;
        coeffs.push(c * ((p + s) * s).sqrt());
    }
    LadderState { coeffs, ..st.clone() }
}

/// `(a*a + b*b) / 2`: `c'_s = (p/2 + s) c_s`.
pub fn apply_halfnumber(st: &LadderState) -> LadderState {
    let half_p = st.p as f64 / 2.0;
    let coeffs = st
        .coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| c * (half_p + s as f64))
        .collect();
    LadderState { coeffs, ..st.clone() }
}

/// ℓ² pairing, conjugate-linear in `x`. States on different ladders are
/// orthogonal.
pub fn inner(x: &LadderState, y: &LadderState) -> C64 {
    if !x.same_ladder(y) {
        return C64::new(0.0, 0.0);
    }
    x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a.conj() * b).sum()
}
