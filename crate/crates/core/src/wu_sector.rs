//! The fixed-`N` sector spanned by `|p+s, s, N−p−2s⟩` in the modes
//! `(k, −k, 0)`: the transformed particle-conserving operator, its exact
//! eigenstates, and `exp(tW)`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lattice::{mode_params, ModeParams, ModelParams, Momentum};
use crate::special::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WuSector {
    pub n_total: usize,
    pub p: usize,
    pub momentum: Momentum,
}

impl WuSector {
    pub fn new(n_total: usize, p: usize, momentum: Momentum) -> Result<Self> {
        if n_total == 0 {
            return invalid("Ntot must be at least 1");
        }
        if p > n_total {
            return invalid(format!("p = {p} exceeds Ntot = {n_total}"));
        }
        if momentum.is_zero() {
            return invalid("the sector needs a nonzero momentum");
        }
        Ok(Self { n_total, p, momentum })
    }

    pub fn dim(&self) -> usize {
        (self.n_total - self.p) / 2 + 1
    }

    /// `(n_k, n_{−k}, n_0)` of basis state `s`.
    pub fn occupations(&self, s: usize) -> [usize; 3] {
        [self.p + s, s, self.n_total - self.p - 2 * s]
    }

    fn condensate(&self, s: usize) -> f64 {
        (self.n_total - self.p - 2 * s) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WuCoupling {
    pub value: f64,
    /// `a = 0`: the coupling vanishes and the sector operator is diagonal.
    pub free: bool,
}

/// `8πa / (L³ ε_k)`.
pub fn wu_ytilde(mode: &ModeParams, mp: &ModelParams) -> WuCoupling {
    if mp.a == 0.0 {
        return WuCoupling { value: 0.0, free: true };
    }
    WuCoupling { value: 8.0 * std::f64::consts::PI * mp.a / (mp.volume() * mode.epsilon), free: false }
}

/// Upper bidiagonal sector operator. `upper[s]` is the entry at `(s, s+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WuMatrix {
    pub epsilon: f64,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl WuMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for s in 0..n {
            m[s][s] = self.diag[s];
            if s + 1 < n {
                m[s][s + 1] = self.upper[s];
            }
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|s| self.diag[s] * v[s] + if s + 1 < self.dim() { self.upper[s] * v[s + 1] } else { 0.0 })
            .collect()
    }

    /// The diagonal, which is the spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

pub fn build_transformed_wu(sector: &WuSector, mp: &ModelParams) -> Result<WuMatrix> {
    let mode = mode_params(mp, &sector.momentum)?;
    let g = 8.0 * std::f64::consts::PI * mp.a / mp.volume();
    let p = sector.p as f64;
    let dim = sector.dim();
    let diag = (0..dim).map(|s| mode.epsilon * (2 * s + sector.p) as f64).collect();
    let upper = (1..dim)
        .map(|s| {
            let sf = s as f64;
            let n0 = sector.condensate(s);
            g * ((p + sf) * sf).sqrt() * ((n0 + 1.0) * (n0 + 2.0)).sqrt()
        })
        .collect();
    Ok(WuMatrix { epsilon: mode.epsilon, diag, upper })
}

/// Eigenvector of the sector operator at `ε_k (2n + p)`, with `v_0 = 1`:
/// `v_s = (2/ỹ)^s C(n, s) / sqrt(C(p+s, s) K!/(K−2s)!)`, `K = Ntot − p`.
pub fn wu_eigenstate(sector: &WuSector, mp: &ModelParams, n_index: usize) -> Result<Vec<f64>> {
    if n_index >= sector.dim() {
        return invalid(format!("n_index = {n_index} outside a sector of dimension {}", sector.dim()));
    }
    if mp.a == 0.0 {
        let mut v = vec![0.0; sector.dim()];
        v[n_index] = 1.0;
        return Ok(v);
    }
    let mode = mode_params(mp, &sector.momentum)?;
    let yt = wu_ytilde(&mode, mp).value;
    let k = (sector.n_total - sector.p) as f64;
    let p = sector.p as f64;
    let mut v = vec![0.0; sector.dim()];
    v[0] = 1.0;
    for s in 0..n_index {
        let sf = s as f64;
        // ratio v_{s+1} / v_s of the closed form
        let r = 2.0 / yt * (n_index - s) as f64 / (sf + 1.0) * ((sf + 1.0) / (p + sf + 1.0)).sqrt()
            / ((k - 2.0 * sf) * (k - 2.0 * sf - 1.0)).sqrt();
        v[s + 1] = v[s] * r;
    }
    Ok(v)
}

/// Largest row residual of `M v = ε(2n+p) v`, each row divided by the sum
/// of the magnitudes of its terms.
pub fn wu_residual(m: &WuMatrix, v: &[f64], energy: f64) -> f64 {
    let mv = m.apply(v);
    (0..m.dim())
        .map(|s| {
            let up = if s + 1 < m.dim() { (m.upper[s] * v[s + 1]).abs() } else { 0.0 };
            let scale = (m.diag[s] * v[s]).abs() + up + (energy * v[s]).abs();
            let r = (mv[s] - energy * v[s]).abs();
            if scale == 0.0 {
                r
            } else {
                r / scale
            }
        })
        .fold(0.0, f64::max)
}

/// The two typographic readings of the eigenstate weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightParse {
    /// `C(K, 2s) / (2s)!` under the square root.
    OverDoubleFactorial,
    /// `C(K, 2s) / (2 s!)` under the square root.
    OverTwiceFactorial,
}

/// `ỹ^{−s} C(n, s) / sqrt(C(p+s, s) C(K, 2s) w_s)` for a literal weight `w_s`.
pub fn wu_eigenstate_literal(sector: &WuSector, mp: &ModelParams, n_index: usize, parse: WeightParse) -> Result<Vec<f64>> {
    let mode = mode_params(mp, &sector.momentum)?;
    let yt = wu_ytilde(&mode, mp).value;
    let k = sector.n_total - sector.p;
    Ok((0..sector.dim())
        .map(|s| {
            let w = match parse {
                WeightParse::OverDoubleFactorial => 1.0 / crate::special::gamma((2 * s) as f64 + 1.0),
                WeightParse::OverTwiceFactorial => 1.0 / (2.0 * crate::special::gamma(s as f64 + 1.0)),
            };
            let c = if s <= n_index { binomial(n_index, s) } else { 0.0 };
            yt.powi(-(s as i32)) * c / (binomial(sector.p + s, s) * binomial(k, 2 * s) * w).sqrt()
        })
        .collect())
}

/// Entry `(s+1, s)` of `W`.
fn w_entry(sector: &WuSector, alpha: f64, s: usize) -> f64 {
    let sf = s as f64;
    let n0 = sector.condensate(s);
    -alpha / sector.n_total as f64 * ((sector.p as f64 + sf + 1.0) * (sf + 1.0)).sqrt() * (n0 * (n0 - 1.0)).sqrt()
}

/// `exp(tW) v`; the series stops because `W^dim = 0`.
pub fn apply_exp_w(sector: &WuSector, alpha: f64, t: f64, v: &[f64]) -> Result<Vec<f64>> {
    let dim = sector.dim();
    if v.len() != dim {
        return Err(crate::Error::Dimension { expected: dim, got: v.len() });
    }
    let w: Vec<f64> = (0..dim.saturating_sub(1)).map(|s| t * w_entry(sector, alpha, s)).collect();
    let mut term = v.to_vec();
    let mut acc = v.to_vec();
    for j in 1..dim {
        let mut next = vec![0.0; dim];
        for s in 0..dim - 1 {
            next[s + 1] = w[s] * term[s] / j as f64;
        }
        term = next;
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
    }
    Ok(acc)
}

/// Largest entry of `|exp(W) exp(−W) − I|` over the basis vectors.
pub fn exp_w_roundtrip_error(sector: &WuSector, alpha: f64) -> Result<f64> {
    let dim = sector.dim();
    let mut worst: f64 = 0.0;
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let back = apply_exp_w(sector, alpha, 1.0, &apply_exp_w(sector, alpha, -1.0, &e)?)?;
        for (i, x) in back.iter().enumerate() {
            worst = worst.max((x - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(worst)
}
