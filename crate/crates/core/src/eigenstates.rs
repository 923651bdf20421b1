//! Closed-form eigenstates of `½N + ỹ ab` on a single ladder, the
//! first-order recurrence they solve, normalizability, and the degenerate
//! families at a given energy.
//!
//! `|Ψ_{p,Θ}⟩ = Σ_s ỹ^{-s} C(Θ, s) C(p+s, s)^{-1/2} |p+s, s⟩` has eigenvalue
//! `p/2 + Θ`. For `Θ ∈ ℕ` the sum stops at `s = Θ`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hamiltonians::apply_hab_alpha;
use crate::ladder::{LadderState, C64};
use crate::special::{binomial, ln_binomial, ln_factorial, ln_gamma, log_sum_exp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenstateSpec {
    pub p: usize,
    pub theta: C64,
    pub ytilde: f64,
    pub smax: usize,
    pub mirror: bool,
}

impl EigenstateSpec {
    pub fn new(p: usize, theta: C64, ytilde: f64, smax: usize) -> Self {
        Self { p, theta, ytilde, smax, mirror: false }
    }

    pub fn energy(&self) -> C64 {
        self.theta + self.p as f64 / 2.0
    }
}

/// `Some(N)` when `theta` is exactly a nonnegative integer.
pub fn theta_as_natural(theta: C64) -> Option<usize> {
    if theta.im == 0.0 && theta.re >= 0.0 && theta.re == theta.re.floor() && theta.re < 1e15 {
        Some(theta.re as usize)
    } else {
        None
    }
}

/// Generalized binomial `C(Θ, s) = Π_{j<s} (Θ − j) / s!`.
pub fn generalized_binomial(theta: C64, s: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..s {
        acc *= (theta - j as f64) / (j + 1) as f64;
    }
    acc
}

fn check_ytilde(yt: f64) -> Result<()> {
    if !(yt > 0.0) || !yt.is_finite() {
        return invalid(format!("ytilde must be finite and > 0, got {yt}"));
    }
    Ok(())
}

/// Coefficients of `|Ψ_{p,Θ}⟩` with `c_0 = 1`, optionally scaled to unit
/// norm. Finite sums stop at `min(N, smax)`.
///
/// Normalizing a state classified [`Normalizability::NotNormalizable`] is
/// rejected: the truncated norm would depend on `smax`.
pub fn psi_p_theta(spec: &EigenstateSpec, normalize: bool) -> Result<LadderState> {
    check_ytilde(spec.ytilde)?;
    let top = match theta_as_natural(spec.theta) {
        Some(n) => n.min(spec.smax),
        None => spec.smax,
    };
    let mut coeffs = Vec::with_capacity(top + 1);
    let mut binom = C64::new(1.0, 0.0);
    let mut ypow = 1.0f64;
    for s in 0..=top {
        if s > 0 {
            binom *= (spec.theta - (s - 1) as f64) / s as f64;
            ypow /= spec.ytilde;
        }
        let lb = if spec.p + s <= 60 { binomial(spec.p + s, s).sqrt().recip() } else { (-0.5 * ln_binomial(spec.p + s, s)).exp() };
        coeffs.push(binom * ypow * lb);
    }
    let st = LadderState::new(spec.p, spec.mirror, coeffs);
    if !normalize {
        return Ok(st);
    }
    if classify_normalizable(spec.ytilde, spec.theta, spec.p)? == Normalizability::NotNormalizable {
        return invalid("state is not normalizable; refusing to normalize a truncation");
    }
    Ok(st.normalized())
}

/// `c_{s+1} = (E − p/2 − s) / (ỹ sqrt((p+s+1)(s+1))) c_s`, `c_0 = 1`.
pub fn recurrence_coeffs(e: C64, p: usize, ytilde: f64, smax: usize) -> Result<LadderState> {
    check_ytilde(ytilde)?;
    let pf = p as f64;
    let mut coeffs = Vec::with_capacity(smax + 1);
    let mut c = C64::new(1.0, 0.0);
    coeffs.push(c);
    for s in 0..smax {
        let sf = s as f64;
        c *= (e - pf / 2.0 - sf) / (ytilde * ((pf + sf + 1.0) * (sf + 1.0)).sqrt());
        coeffs.push(c);
    }
    Ok(LadderState::new(p, false, coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalizability {
    FiniteSum,
    Normalizable,
    NotNormalizable,
}

/// Band around `ỹ = 1` treated as the boundary case.
pub const YTILDE_BOUNDARY_TOL: f64 = 1e-12;

/// Square-summability of `|Ψ_{p,Θ}⟩`, from `|c_s|² ~ K ỹ^{-2s} s^{-(2Θ+2+p)}`.
pub fn classify_normalizable(ytilde: f64, theta: C64, p: usize) -> Result<Normalizability> {
    check_ytilde(ytilde)?;
    if theta_as_natural(theta).is_some() {
        return Ok(Normalizability::FiniteSum);
    }
    if (ytilde - 1.0).abs() <= YTILDE_BOUNDARY_TOL {
        let exponent = 2.0 * theta.re + 2.0 + p as f64;
        return Ok(if exponent > 1.0 { Normalizability::Normalizable } else { Normalizability::NotNormalizable });
    }
    Ok(if ytilde > 1.0 { Normalizability::Normalizable } else { Normalizability::NotNormalizable })
}

/// `ln |c_s|` of `|Ψ_{p,Θ}⟩` for `s = 0..=smax`, with `c_0 = 1`. Entries past
/// a terminating sum are `-inf`.
pub fn log_abs_coeffs(p: usize, theta: C64, ytilde: f64, smax: usize) -> Result<Vec<f64>> {
    check_ytilde(ytilde)?;
    let lny = ytilde.ln();
    let mut out = Vec::with_capacity(smax + 1);
    let mut ln_prod = 0.0f64;
    for s in 0..=smax {
        if s > 0 {
            ln_prod += (theta - (s - 1) as f64).norm().ln();
        }
        out.push(ln_prod - ln_factorial(s) - s as f64 * lny - 0.5 * ln_binomial(p + s, s));
    }
    Ok(out)
}

/// `ln Σ_{s≤S} |c_s|²` for every `S ≤ smax`.
pub fn log_partial_norms(p: usize, theta: C64, ytilde: f64, smax: usize) -> Result<Vec<f64>> {
    let lc = log_abs_coeffs(p, theta, ytilde, smax)?;
    let mut acc = f64::NEG_INFINITY;
    Ok(lc
        .iter()
        .map(|l| {
            acc = log_sum_exp([acc, 2.0 * l]);
            acc
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRatios {
    pub s: Vec<usize>,
    /// `|c_s|² ỹ^{2s} s^{2Θ+2+p} / |c_0|²`.
    pub ratios: Vec<f64>,
    /// `Γ(1+p) / Γ(−Θ)²`.
    pub limit: f64,
    /// Largest `|r_s / r_last − 1|` over the last decade of `s`.
    pub last_decade_drift: f64,
    /// `|r_last / K − 1|`.
    pub final_rel_error: f64,
}

/// Ratios of the exact coefficients to their Stirling tail, for
/// `s ∈ [s_lo, s_hi]`, all in log-space.
pub fn tail_constant(ytilde: f64, theta: f64, p: usize, s_lo: usize, s_hi: usize) -> Result<TailRatios> {
    if theta >= 0.0 && theta == theta.floor() {
        return invalid(format!("theta = {theta} terminates; there is no tail"));
    }
    if s_lo == 0 || s_lo > s_hi {
        return invalid(format!("need 1 <= s_lo <= s_hi, got [{s_lo}, {s_hi}]"));
    }
    let lc = log_abs_coeffs(p, C64::new(theta, 0.0), ytilde, s_hi)?;
    let exponent = 2.0 * theta + 2.0 + p as f64;
    let lny = ytilde.ln();
    let s: Vec<usize> = (s_lo..=s_hi).collect();
    let ratios: Vec<f64> = s
        .iter()
        .map(|&s| (2.0 * lc[s] + 2.0 * s as f64 * lny + exponent * (s as f64).ln()).exp())
        .collect();
    let limit = (ln_gamma(1.0 + p as f64) - 2.0 * ln_gamma(-theta)).exp();
    let last = *ratios.last().expect("nonempty range");
    let decade_start = (s_hi / 10).max(s_lo);
    let last_decade_drift = s
        .iter()
        .zip(&ratios)
        .filter(|(&s, _)| s >= decade_start)
        .map(|(_, r)| (r / last - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(TailRatios { s, ratios, limit, last_decade_drift, final_rel_error: (last / limit - 1.0).abs() })
}

/// `‖(H_ab^(α) − E) st‖` over rows `0..smax`; row `smax` feels the
/// truncation and is left out.
pub fn residual(st: &LadderState, y1: f64, y2: f64, e: C64) -> f64 {
    let h = apply_hab_alpha(st, y1, y2);
    let rows = st.len().saturating_sub(1);
    (0..rows).map(|s| (h.get(s) - st.get(s) * e).norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegenerateState {
    pub p: usize,
    pub n: usize,
    pub mirror: bool,
}

/// All `(p, N, ±)` with `p/2 + N = E`, given `2E`. Both mirror branches are
/// listed for `p > 0`. `max_p` caps the imbalance.
pub fn enumerate_degenerate(twice_energy: usize, max_p: Option<usize>) -> Vec<DegenerateState> {
    let cap = max_p.unwrap_or(twice_energy).min(twice_energy);
    let mut out = Vec::new();
    for p in (twice_energy % 2..=cap).step_by(2) {
        let n = (twice_energy - p) / 2;
        out.push(DegenerateState { p, n, mirror: false });
        if p > 0 {
            out.push(DegenerateState { p, n, mirror: true });
        }
    }
    out
}

/// `2E` as an integer, if `E` is a nonnegative half-integer.
pub fn twice_energy(e: f64) -> Result<usize> {
    let t = 2.0 * e;
    if !(t >= 0.0) || t != t.round() || t > 1e9 {
        return invalid(format!("energy {e} is not of the form p/2 + N"));
    }
    Ok(t as usize)
}
