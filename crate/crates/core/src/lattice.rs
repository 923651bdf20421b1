//! Periodic momentum lattice and the per-mode constants of the quadratic
//! LHY model.
//!
//! Units are ℏ = 2m = 1, so the free dispersion is `|k|²`. Momenta are
//! `k = 2π n / L` with `n ∈ ℤ³`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};

/// Physical inputs of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Scattering length, `a >= 0`.
    pub a: f64,
    /// Number density.
    pub rho: f64,
    /// Box side length.
    pub l: f64,
    /// Nominal particle count, `rho * l³`.
    pub n_particles: f64,
}

impl ModelParams {
    /// Build from density; the particle count follows as `rho * L³`.
    pub fn new(a: f64, rho: f64, l: f64) -> Result<Self> {
        validate(a, rho, l)?;
        Ok(Self { a, rho, l, n_particles: rho * l.powi(3) })
    }

    /// Build from a particle count; the density follows as `N / L³`.
    pub fn with_particles(a: f64, n_particles: f64, l: f64) -> Result<Self> {
        if !(n_particles > 0.0) || !n_particles.is_finite() {
            return invalid(format!("particle count must be positive, got {n_particles}"));
        }
        if !(l > 0.0) || !l.is_finite() {
            return invalid(format!("box length must be positive, got {l}"));
        }
        let rho = n_particles / l.powi(3);
        validate(a, rho, l)?;
        Ok(Self { a, rho, l, n_particles })
    }

    /// `|B_L| = L³`.
    pub fn volume(&self) -> f64 {
        self.l.powi(3)
    }

    /// `4πaρ`, the coupling scale that appears everywhere.
    pub fn coupling(&self) -> f64 {
        4.0 * PI * self.a * self.rho
    }

    /// The constant `4πaρN` of the quadratic Hamiltonian.
    pub fn mean_field_energy(&self) -> f64 {
        self.coupling() * self.n_particles
    }

    pub fn is_free(&self) -> bool {
        self.a == 0.0
    }
}

fn validate(a: f64, rho: f64, l: f64) -> Result<()> {
    if !(a >= 0.0) || !a.is_finite() {
        return invalid(format!("scattering length must be >= 0, got {a}"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return invalid(format!("density must be positive, got {rho}"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return invalid(format!("box length must be positive, got {l}"));
    }
    Ok(())
}

/// A lattice momentum `k = 2π n / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum {
    pub n: [i32; 3],
    pub k: [f64; 3],
}

impl Momentum {
    pub fn new(n: [i32; 3], l: f64) -> Self {
        let scale = 2.0 * PI / l;
        Self { n, k: n.map(|c| scale * c as f64) }
    }

    pub fn norm_sq_index(&self) -> i64 {
        self.n.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    pub fn ksq(&self) -> f64 {
        self.k.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.ksq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.n == [0, 0, 0]
    }

    pub fn negated(&self) -> Self {
        Self { n: self.n.map(|c| -c), k: self.k.map(|c| -c) }
    }

    /// Lexicographic-positive half space: `n₃ > 0`, or `n₃ = 0, n₂ > 0`, or
    /// `n₃ = n₂ = 0, n₁ > 0`.
    pub fn in_positive_half(&self) -> bool {
        let [n1, n2, n3] = self.n;
        n3 > 0 || (n3 == 0 && n2 > 0) || (n3 == 0 && n2 == 0 && n1 > 0)
    }
}

/// Every nonzero lattice momentum of the cube `{-nmax..nmax}³` lying in the
/// lexicographic-positive half, sorted by `|n|²` and then lexicographically
/// by `n`. Exactly one of each `±k` pair is returned.
pub fn half_lattice(l: f64, nmax: i32) -> Result<Vec<Momentum>> {
    if nmax < 1 {
        return invalid(format!("nmax must be >= 1, got {nmax}"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return invalid(format!("box length must be positive, got {l}"));
    }
    let mut out = Vec::new();
    for n1 in -nmax..=nmax {
        for n2 in -nmax..=nmax {
            for n3 in -nmax..=nmax {
                let m = Momentum::new([n1, n2, n3], l);
                if m.in_positive_half() {
                    out.push(m);
                }
            }
        }
    }
    out.sort_by(|x, y| x.norm_sq_index().cmp(&y.norm_sq_index()).then(x.n.cmp(&y.n)));
    Ok(out)
}

/// Which root of the quadratic that eliminates the `a*_k a*_{-k}` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlphaBranch {
    /// The root in `[0, 1)`, giving a positive spectrum. Used everywhere.
    Minus,
    /// The reciprocal root, `> 1`. Exploration only.
    Plus,
}

/// Per-momentum derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeParams {
    pub momentum: Momentum,
    pub ksq: f64,
    /// `4πaρ / (k² + 8πaρ)`, in `[0, 1/2)`.
    pub y: f64,
    /// `y / sqrt(1 - 4y²)`.
    pub ytilde: f64,
    /// Pair-excitation amplitude.
    pub alpha: f64,
    /// Bogoliubov single-quantum energy `k sqrt(k² + 16πaρ)`.
    pub epsilon: f64,
}

impl ModeParams {
    /// `k² + 8πaρ`, the bracket scale of the per-mode block.
    pub fn bracket_scale(&self, mp: &ModelParams) -> f64 {
        self.ksq + 2.0 * mp.coupling()
    }
}

/// `y(k) = 4πaρ / (k² + 8πaρ)`.
pub fn coupling_y(mp: &ModelParams, ksq: f64) -> f64 {
    let c = mp.coupling();
    c / (ksq + 2.0 * c)
}

/// `ε_k = |k| sqrt(k² + 16πaρ)`.
pub fn bogoliubov_energy(mp: &ModelParams, ksq: f64) -> f64 {
    (ksq * (ksq + 4.0 * mp.coupling())).sqrt()
}

/// Root of `4πaρ α² − (k² + 8πaρ) α + 4πaρ = 0` on the requested branch.
///
/// The minus branch is evaluated as `8πaρ / ((k²+8πaρ) + k sqrt(k²+16πaρ))`
/// so the free limit `a = 0` gives exactly 0.
pub fn alpha_branch(mp: &ModelParams, ksq: f64, branch: AlphaBranch) -> Result<f64> {
    let two_c = 2.0 * mp.coupling();
    let bracket = ksq + two_c;
    let root = ksq.sqrt() * (ksq + 2.0 * two_c).sqrt();
    match branch {
        AlphaBranch::Minus => Ok(two_c / (bracket + root)),
        AlphaBranch::Plus => {
            if two_c == 0.0 {
                return invalid("plus branch diverges in the free limit a = 0");
            }
            Ok((bracket + root) / two_c)
        }
    }
}

/// Constants for one nonzero momentum, minus branch.
pub fn mode_params(mp: &ModelParams, momentum: &Momentum) -> Result<ModeParams> {
    mode_params_with_branch(mp, momentum, AlphaBranch::Minus)
}

pub fn mode_params_with_branch(
    mp: &ModelParams,
    momentum: &Momentum,
    branch: AlphaBranch,
) -> Result<ModeParams> {
    if momentum.is_zero() {
        return invalid("the condensate mode k = 0 has no mode parameters");
    }
    let ksq = momentum.ksq();
    let y = coupling_y(mp, ksq);
    Ok(ModeParams {
        momentum: *momentum,
        ksq,
        y,
        ytilde: ytilde(y)?,
        alpha: alpha_branch(mp, ksq, branch)?,
        epsilon: bogoliubov_energy(mp, ksq),
    })
}

fn check_y(y: f64) -> Result<()> {
    if !(0.0..0.5).contains(&y) {
        return invalid(format!("coupling y must lie in [0, 1/2), got {y}"));
    }
    Ok(())
}

/// `sqrt(1 - 4y²)`, the per-quantum spacing of the ab-ladder.
pub fn radical(y: f64) -> f64 {
    (1.0 - 4.0 * y * y).sqrt()
}

/// `ỹ = y / sqrt(1 - 4y²)`.
pub fn ytilde(y: f64) -> Result<f64> {
    check_y(y)?;
    Ok(y / radical(y))
}

/// Inverse of [`ytilde`]: `y = ỹ / sqrt(1 + 4ỹ²)`.
pub fn y_from_ytilde(yt: f64) -> Result<f64> {
    if !(yt >= 0.0) || !yt.is_finite() {
        return invalid(format!("ytilde must be finite and >= 0, got {yt}"));
    }
    Ok(yt / (1.0 + 4.0 * yt * yt).sqrt())
}

/// Critical amplitude `α_c(y) = (1 - sqrt(1 - 4y²)) / (2y)`, evaluated as
/// `2y / (1 + sqrt(1 - 4y²))`, which is exact at `y = 0`.
pub fn alpha_c(y: f64) -> Result<f64> {
    check_y(y)?;
    Ok(2.0 * y / (1.0 + radical(y)))
}

/// Transformed couplings `(y1, y2)` of `H_ab^(α)`.
///
/// `y2` is evaluated in the factored form `y (α_c − α)(1/α_c − α)/(1 − 2αy)`
/// so that it is exactly zero at `α = α_c`. Inputs within `1e-14` relative of
/// `α_c` are snapped onto it.
pub fn y12(y: f64, alpha: f64) -> Result<(f64, f64)> {
    let ac = alpha_c(y)?;
    if !(alpha >= 0.0) {
        return invalid(format!("alpha must be >= 0, got {alpha}"));
    }
    let snap = 1e-14 * ac.max(f64::MIN_POSITIVE);
    if alpha > ac + snap {
        return invalid(format!("alpha = {alpha} exceeds alpha_c(y) = {ac}"));
    }
    if y == 0.0 {
        return Ok((0.0, 0.0));
    }
    let alpha = if (alpha - ac).abs() <= snap { ac } else { alpha };
    let denom = 1.0 - 2.0 * alpha * y;
    let y1 = y / denom;
    let y2 = y * (ac - alpha) * (1.0 / ac - alpha) / denom;
    Ok((y1, y2))
}

/// `4πaρ Σ α(k)` over the full truncated lattice (both `k` and `-k`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSum {
    pub value: f64,
    pub modes: usize,
    /// Set whenever `a > 0`: the sum grows without bound in `nmax` and is
    /// reported unrenormalized.
    pub divergent: bool,
}

pub fn alpha_sum(mp: &ModelParams, nmax: i32) -> Result<AlphaSum> {
    let half = half_lattice(mp.l, nmax)?;
    let mut acc = 0.0;
    for m in &half {
        acc += alpha_branch(mp, m.ksq(), AlphaBranch::Minus)?;
    }
    Ok(AlphaSum {
        value: mp.coupling() * 2.0 * acc,
        modes: 2 * half.len(),
        divergent: mp.a > 0.0,
    })
}

/// Closed-form per-mode pair occupancy `α² / (1 − α²)` of `e^{-P}|vac⟩`.
pub fn pair_occupancy(alpha: f64) -> f64 {
    alpha * alpha / (1.0 - alpha * alpha)
}

/// Condensate depletion `Σ_{k in half lattice} 2 α(k)² / (1 − α(k)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepletionReport {
    pub depletion: f64,
    pub n_particles: f64,
    /// `depletion / N`; the average-particle constraint is self-consistent
    /// when this is small.
    pub fraction: f64,
}

pub fn depletion(mp: &ModelParams, nmax: i32) -> Result<DepletionReport> {
    let mut acc = 0.0;
    for m in half_lattice(mp.l, nmax)? {
        let a = alpha_branch(mp, m.ksq(), AlphaBranch::Minus)?;
        acc += 2.0 * pair_occupancy(a);
    }
    Ok(DepletionReport {
        depletion: acc,
        n_particles: mp.n_particles,
        fraction: acc / mp.n_particles,
    })
}
