//! Generating functions `G(z) = Σ C_s z^s` of ladder states, with
//! `C_s = sqrt(s!/(p+s)!) c_s`.
//!
//! An eigenstate of `H_ab^(α)` with eigenvalue `E` has a generating
//! function solving
//! `z(y2 z² + z + y1) G' + (y2 z² + (p/2 − E) z + y1 p) G = C_0 y1 p`,
//! which is checked here order by order rather than integrated.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::ladder::{LadderState, C64};
use crate::lattice::{alpha_c, radical, y12};
use crate::pair_transform::{from_rescaled, to_rescaled};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenFn {
    pub p: usize,
    pub mirror: bool,
    pub coeffs: Vec<C64>,
}

impl GenFn {
    pub fn new(p: usize, coeffs: Vec<C64>) -> Self {
        Self { p, mirror: false, coeffs }
    }

    pub fn from_real(p: usize, coeffs: &[f64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn from_state(st: &LadderState) -> Self {
        Self { p: st.p(), mirror: st.mirror(), coeffs: to_rescaled(st) }
    }

    pub fn to_state(&self) -> LadderState {
        from_rescaled(self.p, self.mirror, &self.coeffs)
    }

    pub fn smax(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn get(&self, s: usize) -> C64 {
        self.coeffs.get(s).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

/// Largest coefficient mismatch of the generating-function ODE over orders
/// `0..=smax`, the orders whose coefficients are fully determined by the
/// stored `C_0..=C_smax`.
///
/// Order `m` reads `y2 (m−1) C_{m−2} + (m − 1 + p/2 − E) C_{m−1} + y1 (m+p) C_m`
/// (minus `y1 p C_0` at `m = 0`).
pub fn ode_residual(g: &GenFn, e: C64, p: usize, y1: f64, y2: f64) -> f64 {
    let Some(smax) = g.smax() else { return 0.0 };
    let pf = p as f64;
    let mut worst = 0.0f64;
    for m in 0..=smax {
        let mf = m as f64;
        let mut acc = g.get(m) * (y1 * (mf + pf));
        if m >= 1 {
            acc += g.get(m - 1) * (mf - 1.0 + pf / 2.0 - e);
        }
        if m >= 2 {
            acc += g.get(m - 2) * (y2 * (mf - 1.0));
        }
        if m == 0 {
            acc -= g.get(0) * (y1 * pf);
        }
        worst = worst.max(acc.norm());
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Roots {
    pub z_plus: f64,
    /// `-inf` at `α = α_c`, where `y2` vanishes.
    pub z_minus: f64,
}

fn check_range(y: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(y > 0.0 && y < 0.5) {
        return invalid(format!("y must lie in (0, 1/2), got {y}"));
    }
    y12(y, alpha)
}

/// Zeros of `y2 z² + z + y1`. `z₊ = −2y1 / (1 + sqrt(1 − 4 y1 y2))` stays
/// finite as `y2 → 0`; `z₋ = y1 / (y2 z₊)`.
pub fn roots(y: f64, alpha: f64) -> Result<Roots> {
    let (y1, y2) = check_range(y, alpha)?;
    let disc = (1.0 - 4.0 * y1 * y2).max(0.0).sqrt();
    let z_plus = -2.0 * y1 / (1.0 + disc);
    let z_minus = if y2 == 0.0 { f64::NEG_INFINITY } else { y1 / (y2 * z_plus) };
    Ok(Roots { z_plus, z_minus })
}

/// `B = ((p/2 − E − 1) z₊ + y1 (p − 1)) / (z₊ + 2 y1)`.
pub fn b_from_e(e: C64, p: usize, y: f64, alpha: f64) -> Result<C64> {
    let (y1, _) = check_range(y, alpha)?;
    let zp = roots(y, alpha)?.z_plus;
    let pf = p as f64;
    Ok(((pf / 2.0 - e - 1.0) * zp + y1 * (pf - 1.0)) / (zp + 2.0 * y1))
}

/// Inverse of [`b_from_e`]: `E + 1 − p/2 = −B − (y1/z₊)(2B + 1 − p)`.
///
/// At `α = α_c`, `y1/z₊ = −1` and this is `E = B − p/2`; at `α = 0` and
/// `B = n + p` it gives the Bogoliubov level `sqrt(1 − 4y²)(n + p/2 + ½) − ½`.
pub fn e_from_b(b: C64, p: usize, y: f64, alpha: f64) -> Result<C64> {
    let (y1, _) = check_range(y, alpha)?;
    let zp = roots(y, alpha)?.z_plus;
    let pf = p as f64;
    Ok(-b - (2.0 * b + 1.0 - pf) * (y1 / zp) - 1.0 + pf / 2.0)
}

/// Power series of `(1 + αz)^{-1} G(z / (1 + αz))` through the order of `g`,
/// by Horner composition of truncated series.
pub fn mobius(g: &GenFn, alpha: f64) -> GenFn {
    let n = g.coeffs.len();
    if n == 0 {
        return g.clone();
    }
    // w = z / (1 + αz) = Σ_{j≥1} (−α)^{j−1} z^j
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut pw = 1.0;
    for wj in w.iter_mut().skip(1) {
        *wj = C64::new(pw, 0.0);
        pw *= -alpha;
    }
    let mut acc = vec![C64::new(0.0, 0.0); n];
    for c in g.coeffs.iter().rev() {
        acc = series_mul(&acc, &w, n);
        acc[0] += c;
    }
    // Multiply by 1/(1 + αz): a_m ← a_m − α a_{m−1}, cumulatively.
    for m in 1..n {
        let prev = acc[m - 1];
        acc[m] -= prev * alpha;
    }
    GenFn { p: g.p, mirror: g.mirror, coeffs: acc }
}

fn series_mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `Q = αy + 2y(y − α + α²y) / (1 − 2αy − sqrt(1 − 4y²))`.
///
/// Numerator and denominator both vanish at `α = α_c`; within `1e-8` of it
/// the limit `y / α_c` is returned.
pub fn q_invariant(y: f64, alpha: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&y) {
        return invalid(format!("y must lie in [0, 1/2), got {y}"));
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    let ac = alpha_c(y)?;
    if !(alpha >= 0.0 && alpha <= ac * (1.0 + 1e-14)) {
        return invalid(format!("alpha must lie in [0, alpha_c = {ac}], got {alpha}"));
    }
    if (alpha - ac).abs() <= 1e-8 * ac {
        return Ok(y / ac);
    }
    let num = 2.0 * y * (y - alpha + alpha * alpha * y);
    // 1 − sqrt(1 − 4y²) written as 4y² / (1 + sqrt(1 − 4y²)) to keep small y exact.
    let den = 4.0 * y * y / (1.0 + radical(y)) - 2.0 * alpha * y;
    Ok(alpha * y + num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Analyticity {
    AnalyticInDisk,
    SingularInDisk,
    Boundary,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `+inf` for polynomials.
    pub radius: f64,
    pub class: Analyticity,
}

pub const MIN_RADIUS_COEFFS: usize = 64;
const RADIUS_BAND: f64 = 0.02;

/// Radius of convergence from the ratios `|C_m / C_{m−1}|` over the last
/// half of the coefficients, extrapolated linearly in `1/m` to remove the
/// power-law correction a `m^θ` prefactor puts on each ratio.
pub fn singularity_radius(g: &GenFn) -> RadiusEstimate {
    let n = g.coeffs.len();
    if n < MIN_RADIUS_COEFFS {
        return RadiusEstimate { radius: f64::NAN, class: Analyticity::Inconclusive };
    }
    let last_nonzero = g.coeffs.iter().rposition(|c| c.norm() > 0.0);
    match last_nonzero {
        None => return RadiusEstimate { radius: f64::INFINITY, class: Analyticity::AnalyticInDisk },
        Some(k) if k < n / 2 => {
            return RadiusEstimate { radius: f64::INFINITY, class: Analyticity::AnalyticInDisk };
        }
        _ => {}
    }
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .filter_map(|m| {
            let (a, b) = (g.coeffs[m].norm(), g.coeffs[m - 1].norm());
            (a > 0.0 && b > 0.0).then(|| (1.0 / m as f64, a / b))
        })
        .collect();
    if pts.len() < 8 {
        return RadiusEstimate { radius: f64::NAN, class: Analyticity::Inconclusive };
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let inv_radius = my - (sxy / sxx) * mx;
    let radius = if inv_radius <= 0.0 { f64::INFINITY } else { 1.0 / inv_radius };
    let class = if radius > 1.0 + RADIUS_BAND {
        Analyticity::AnalyticInDisk
    } else if radius < 1.0 - RADIUS_BAND {
        Analyticity::SingularInDisk
    } else {
        Analyticity::Boundary
    };
    RadiusEstimate { radius, class }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenstates::{psi_p_theta, EigenstateSpec};
    use crate::hamiltonians::bog_energy_ab;
    use crate::lattice::ytilde;
    use crate::pair_transform::apply_exp_pair;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn rescaling_examples() {
        let st = LadderState::from_real(0, &[0.3, -2.0, 1.5]);
        assert_eq!(GenFn::from_state(&st).coeffs, st.coeffs());
        let g = GenFn::from_state(&LadderState::from_real(1, &[1.0, 1.0]));
        assert_eq!(g.coeffs[0], c(1.0));
        assert_relative_eq!(g.coeffs[1].re, 0.5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn ode_examples() {
        let yt = 0.8;
        let psi = psi_p_theta(&EigenstateSpec::new(0, c(1.0), yt, 1), false).unwrap();
        let g = GenFn::from_state(&psi.resized(6));
        assert!(ode_residual(&g, c(1.0), 0, yt, 0.0) <= 1e-14);

        let g = GenFn::from_real(2, &[0.4, 0.1, -0.3, 0.2]);
        assert!(ode_residual(&g, c(0.3), 2, 0.3, 0.2) > 0.0);

        assert_eq!(ode_residual(&GenFn::from_real(0, &[1.0]), c(0.0), 0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn ode_matches_eigenvalue_rows() {
        // Transported eigenstates satisfy the ODE of H_ab(y) = H_ab^(0).
        let y = 0.3;
        let ac = alpha_c(y).unwrap();
        for (p, n) in [(0, 2), (3, 1)] {
            let psi = psi_p_theta(&EigenstateSpec::new(p, c(n as f64), ytilde(y).unwrap(), n), false).unwrap();
            let g = GenFn::from_state(&apply_exp_pair(&psi, -ac, 80));
            let e = bog_energy_ab(y, p, n).unwrap();
            let scale = g.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(ode_residual(&g, c(e), p, y, y) <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn roots_examples() {
        let r = roots(0.3, 0.0).unwrap();
        assert_relative_eq!(r.z_plus, -1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.z_minus, -3.0, max_relative = 1e-14);

        let ac = alpha_c(0.3).unwrap();
        let r = roots(0.3, ac).unwrap();
        let (y1, _) = y12(0.3, ac).unwrap();
        assert_eq!(r.z_minus, f64::NEG_INFINITY);
        assert_relative_eq!(r.z_plus, -y1, max_relative = 1e-14);

        let mut last = 0.0;
        for t in [0.9, 0.99, 0.999, 0.9999] {
            let zm = roots(0.3, t * ac).unwrap().z_minus;
            assert!(zm < last);
            last = zm;
        }
        assert!(last < -1e3);
        assert!(roots(0.5, 0.0).is_err());
        assert!(roots(0.3, 0.5).is_err());
    }

    #[test]
    fn root_closed_forms_and_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let y = rng.gen_range(0.01..0.49);
            let ac = alpha_c(y).unwrap();
            let alpha = rng.gen_range(0.0..ac * 0.999);
            let r = roots(y, alpha).unwrap();
            let (y1, y2) = y12(y, alpha).unwrap();
            assert_relative_eq!(r.z_plus, 1.0 / (alpha - 1.0 / ac), max_relative = 1e-10);
            assert_relative_eq!(r.z_minus, 1.0 / (alpha - ac), max_relative = 1e-9);
            // The product of the roots is y1/y2; it equals 1 only at α = 0.
            assert_relative_eq!(r.z_plus * r.z_minus, y1 / y2, max_relative = 1e-9);
            assert!(r.z_plus.abs() <= 1.0 / (1.0 - alpha));
            assert!(r.z_minus.abs() * (1.0 - alpha) > 1.0);
        }
        let r = roots(0.2, 0.0).unwrap();
        assert_relative_eq!(r.z_plus * r.z_minus, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn b_and_e_at_critical_amplitude() {
        let y = 0.3;
        let ac = alpha_c(y).unwrap();
        for p in 0..4 {
            for b in 0..6 {
                let e = e_from_b(c(b as f64), p, y, ac).unwrap();
                assert!((e - c(b as f64 - p as f64 / 2.0)).norm() < 1e-13);
            }
        }
        assert!((e_from_b(c(1.0), 0, y, ac).unwrap() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn b_and_e_reproduce_bogoliubov_levels() {
        for y in [0.1, 0.3, 0.45] {
            let ac = alpha_c(y).unwrap();
            for p in 0..4 {
                for n in 0..6 {
                    let b = c((n + p) as f64);
                    let target = bog_energy_ab(y, p, n).unwrap();
                    let e0 = e_from_b(b, p, y, 0.0).unwrap();
                    assert!((e0.re - target).abs() < 1e-13 && e0.im == 0.0);
                    for t in [0.25, 0.5, 0.75, 1.0] {
                        let a = t * ac;
                        let e = e_from_b(b, p, y, a).unwrap().re;
                        assert!(((1.0 - 2.0 * a * y) * e - a * y - target).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let g = mobius(&GenFn::from_real(0, &[1.0, 0.0, 0.0, 0.0, 0.0]), 0.3);
        for (m, z) in g.coeffs.iter().enumerate() {
            assert_relative_eq!(z.re, (-0.3f64).powi(m as i32), max_relative = 1e-14);
        }
        let g = mobius(&GenFn::from_real(0, &[0.0, 1.0, 0.0, 0.0, 0.0]), 0.5);
        let expect = [0.0, 1.0, -1.0, 0.75, -0.5];
        for (z, e) in g.coeffs.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-15);
        }
        let g0 = GenFn::from_real(1, &[0.2, -0.4, 0.9]);
        assert_eq!(mobius(&g0, 0.0), g0);
    }

    #[test]
    fn q_examples() {
        let ac = alpha_c(0.3).unwrap();
        for a in [0.0, 0.1, ac] {
            assert!((q_invariant(0.3, a).unwrap() - 0.9).abs() < 1e-12);
        }
        assert_relative_eq!(q_invariant(1e-9, 0.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(q_invariant(0.45, 0.0).unwrap(), 0.5 * (1.0 + 0.19f64.sqrt()), max_relative = 1e-12);
        assert_relative_eq!(q_invariant(0.45, 0.0).unwrap(), 0.717_944_947_177_033_7, max_relative = 1e-12);
        assert!(q_invariant(0.3, 0.4).is_err());
    }

    #[test]
    fn radius_examples() {
        let g = GenFn::new(0, (0..120).map(|m| c(3f64.powi(-m))).collect());
        let r = singularity_radius(&g);
        assert_eq!(r.class, Analyticity::AnalyticInDisk);
        assert_relative_eq!(r.radius, 3.0, max_relative = 1e-6);

        let g = GenFn::new(0, (0..120).map(|m| c(2f64.powi(m))).collect());
        let r = singularity_radius(&g);
        assert_eq!(r.class, Analyticity::SingularInDisk);
        assert_relative_eq!(r.radius, 0.5, max_relative = 1e-6);

        let psi = psi_p_theta(&EigenstateSpec::new(0, c(0.5), 0.5, 200), false).unwrap();
        let r = singularity_radius(&GenFn::from_state(&psi));
        assert_eq!(r.class, Analyticity::SingularInDisk);
        assert_relative_eq!(r.radius, 0.5, max_relative = 0.02);

        let psi = psi_p_theta(&EigenstateSpec::new(0, c(0.5), 1.0, 200), false).unwrap();
        assert_eq!(singularity_radius(&GenFn::from_state(&psi)).class, Analyticity::Boundary);

        let g = GenFn::from_real(0, &[1.0; 10]);
        assert_eq!(singularity_radius(&g).class, Analyticity::Inconclusive);
        let mut poly = vec![0.0; 100];
        poly[..5].copy_from_slice(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(singularity_radius(&GenFn::from_real(0, &poly)).radius, f64::INFINITY);
    }

    #[test]
    fn singularity_transport() {
        // Positive z0 makes the float composition cancel; keep that case mild.
        for (z0, alpha) in [(-2.0f64, 0.3), (-1.5, 0.2), (-0.8, 0.5), (-3.0, 0.9), (2.0, 0.05)] {
            let g = GenFn::new(0, (0..128).map(|m| c(z0.powi(-m))).collect());
            let r = singularity_radius(&mobius(&g, alpha)).radius;
            let expect = (z0 / (1.0 - alpha * z0)).abs();
            assert!((r / expect - 1.0).abs() < 0.05, "z0={z0} alpha={alpha} r={r} expect={expect}");
        }
    }

    proptest! {
        #[test]
        fn round_trip(p in 0usize..6, v in prop::collection::vec(-3.0f64..3.0, 1..50)) {
            let st = LadderState::from_real(p, &v);
            let back = GenFn::from_state(&st).to_state();
            for s in 0..v.len() {
                prop_assert!((back.get(s) - st.get(s)).norm() <= 1e-14 * st.get(s).norm().max(1e-300));
            }
        }

        #[test]
        fn mobius_equals_pair_exponential(
            p in 0usize..4,
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
            alpha in 0.0f64..0.9,
        ) {
            let mut coeffs: Vec<C64> = v.iter().map(|&(a, b)| C64::new(a, b)).collect();
            coeffs.resize(61, C64::new(0.0, 0.0));
            let st = LadderState::new(p, false, coeffs);
            let g = GenFn::from_state(&st);
            let lhs = mobius(&g, alpha);
            let rhs = GenFn::from_state(&apply_exp_pair(&st, -alpha, 60));
            let scale = rhs.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
            for m in 0..=60 {
                prop_assert!((lhs.get(m) - rhs.get(m)).norm() <= 1e-11 * scale);
            }
        }

        #[test]
        fn b_e_round_trip(y in 0.05f64..0.49, t in 0.0f64..1.0, br in -5.0f64..10.0, bi in -3.0f64..3.0, p in 0usize..5) {
            let alpha = t * alpha_c(y).unwrap();
            let b = C64::new(br, bi);
            let e = e_from_b(b, p, y, alpha).unwrap();
            let b2 = b_from_e(e, p, y, alpha).unwrap();
            prop_assert!((b - b2).norm() <= 1e-12 * (1.0 + b.norm()));
        }

        #[test]
        fn q_is_constant(y in 0.01f64..0.49, t in 0.0f64..=1.0) {
            let alpha = t * alpha_c(y).unwrap();
            let q = q_invariant(y, alpha).unwrap();
            prop_assert!((q - 0.5 * (1.0 + radical(y))).abs() <= 1e-9);
        }
    }
}
