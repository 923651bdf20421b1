//! Terminating Gauss hypergeometric sums, the two identities the
//! completeness argument runs on, the family `f_N`, and a Gram-matrix
//! witness that the transported eigenstates span a ladder.

use serde::Serialize;

use crate::eigenstates::{psi_p_theta, EigenstateSpec};
use crate::error::{invalid, Result};
use crate::ladder::{inner, LadderState, C64};
use crate::lattice::{alpha_c, ytilde};
use crate::oracle::svd_small;
use crate::pair_transform::apply_exp_pair;
use crate::special::binomial;

/// Degree at which `(x)_m` first vanishes, if `x` is a nonpositive integer.
fn termination(x: f64) -> Option<usize> {
    (x <= 0.0 && x == x.floor()).then(|| (-x) as usize)
}

/// Coefficients `t_m = (a)_m (b)_m / ((c)_m m!)` of a terminating `F(a, b; c)`.
fn hyp_coeffs(a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    let n = match (termination(a), termination(b)) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return invalid(format!("F({a}, {b}; {c}) does not terminate")),
    };
    if let Some(k) = termination(c) {
        if k < n {
            return invalid(format!("c = {c} hits a pole before the series terminates"));
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    out.push(t);
    for m in 0..n {
        let mf = m as f64;
        t *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0));
        out.push(t);
    }
    Ok(out)
}

/// `F(a, b; c; z)` when `a` or `b` is a nonpositive integer.
pub fn hyp_f(a: f64, b: f64, c: f64, z: C64) -> Result<C64> {
    let t = hyp_coeffs(a, b, c)?;
    Ok(t.iter().rev().fold(C64::new(0.0, 0.0), |acc, t| acc * z + t))
}

/// `m z F(−m+1, −N; p+1; z) + (p+1+2N) F − (p+1+N) F(−N−1) − N F(−N+1)`,
/// divided by `1 +` the sum of the magnitudes of its four terms.
/// `N = 0` is the exceptional two-term form.
pub fn contiguous_residual(m: usize, n: usize, p: usize, z: C64) -> Result<C64> {
    let (mf, nf, c) = (m as f64, n as f64, p as f64 + 1.0);
    let lhs = z * mf * hyp_f(1.0 - mf, -nf, c, z)?;
    let f = hyp_f(-mf, -nf, c, z)?;
    let f_up = hyp_f(-mf, -nf - 1.0, c, z)?;
    let terms = if n == 0 {
        [f * (-c), f_up * c, C64::new(0.0, 0.0)]
    } else {
        let f_down = hyp_f(-mf, -nf + 1.0, c, z)?;
        [f * (-(c + 2.0 * nf)), f_up * (c + nf), f_down * nf]
    };
    let rhs: C64 = terms.iter().sum();
    let scale = 1.0 + lhs.norm() + terms.iter().map(|t| t.norm()).sum::<f64>();
    Ok((lhs - rhs) / scale)
}

/// `d/dz [z^m F(−m, b; c; 1/z)] − m z^{m−1} F(−m+1, b; c; 1/z)` for
/// `a = −m`, compared as Laurent polynomials and evaluated at `z`.
///
/// Both sides are polynomials in `z`; coefficient `z^{m−1−s}` reads
/// `(m − s) t_s` on the left and `m u_s` on the right, equal by
/// `(a + s)(a)_s = a (a+1)_s`.
pub fn derivative_residual(a: i64, b: f64, c: f64, z: C64) -> Result<C64> {
    if a >= 0 {
        return invalid(format!("a must be a negative integer, got {a}"));
    }
    if z.norm() == 0.0 {
        return invalid("z must be nonzero");
    }
    let m = (-a) as usize;
    let mf = m as f64;
    let t = hyp_coeffs(-mf, b, c)?;
    let u = hyp_coeffs(1.0 - mf, b, c)?;
    let len = t.len().max(u.len());
    let mut acc = C64::new(0.0, 0.0);
    for s in (0..len).rev() {
        let left = t.get(s).map_or(0.0, |t| (mf - s as f64) * t);
        let right = u.get(s).map_or(0.0, |u| mf * u);
        // Power z^{m−1−s}; s runs up to m, so it can reach z^{−1}.
        acc += z.powi(m as i32 - 1 - s as i32) * (left - right);
    }
    Ok(acc)
}

/// The same identity with the exponent sign reversed,
/// `d/dz [z^a F(a, b; c; 1/z)] − a z^{a−1} F(a+1, b; c; 1/z)` at real `z`.
/// Nonzero in general; kept as a negative control.
pub fn flipped_exponent_residual(a: i64, b: f64, c: f64, z: f64) -> Result<f64> {
    let af = a as f64;
    let t = hyp_coeffs(af, b, c)?;
    let lhs: f64 = t.iter().enumerate().map(|(s, t)| t * (af - s as f64) * z.powf(af - s as f64 - 1.0)).sum();
    let rhs = af * z.powf(af - 1.0) * hyp_f(af + 1.0, b, c, C64::new(1.0 / z, 0.0))?.re;
    Ok(lhs - rhs)
}

/// `f_N(z) = Σ_m conj(d_m) z^m sqrt(C(p+m, m)) F(−m, −N; p+1; 1/(ỹz))` as
/// a polynomial in `z` (coefficient `q` of the returned vector is `z^q`).
pub fn f_family_poly(n: usize, p: usize, ytilde: f64, d: &[C64]) -> Result<Vec<C64>> {
    if !(ytilde > 0.0) {
        return invalid(format!("ytilde must be > 0, got {ytilde}"));
    }
    let mut poly = vec![C64::new(0.0, 0.0); d.len().max(1)];
    for (m, dm) in d.iter().enumerate() {
        if dm.norm() == 0.0 {
            continue;
        }
        let w = dm.conj() * binomial(p + m, m).sqrt();
        let t = hyp_coeffs(-(m as f64), -(n as f64), p as f64 + 1.0)?;
        for (s, ts) in t.iter().enumerate() {
            poly[m - s] += w * ts * ytilde.powi(-(s as i32));
        }
    }
    Ok(poly)
}

fn eval_poly(poly: &[C64], z: C64) -> C64 {
    poly.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub fn f_family(n: usize, p: usize, ytilde: f64, d: &[C64], z: C64) -> Result<C64> {
    if z.norm() == 0.0 {
        return invalid("f_N is defined through 1/z; z must be nonzero");
    }
    Ok(eval_poly(&f_family_poly(n, p, ytilde, d)?, z))
}

/// `|f_N'(z) − ỹ(−(p+1+2N) f_N + (p+1+N) f_{N+1} + N f_{N−1})|`, with
/// `f_N'` differentiated exactly from its polynomial coefficients.
pub fn f_recurrence_residual(n: usize, p: usize, ytilde: f64, d: &[C64], z: C64) -> Result<f64> {
    if z.norm() == 0.0 {
        return invalid("z must be nonzero");
    }
    let poly = f_family_poly(n, p, ytilde, d)?;
    let deriv: Vec<C64> = poly.iter().enumerate().skip(1).map(|(q, c)| c * q as f64).collect();
    let lhs = eval_poly(&deriv, z);
    let (pf, nf) = (p as f64, n as f64);
    let mut rhs = f_family(n, p, ytilde, d, z)? * (-(pf + 1.0 + 2.0 * nf)) + f_family(n + 1, p, ytilde, d, z)? * (pf + 1.0 + nf);
    if n > 0 {
        rhs += f_family(n - 1, p, ytilde, d, z)? * nf;
    }
    Ok((lhs - rhs * ytilde).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramWitness {
    pub p: usize,
    pub y: f64,
    pub nmax: usize,
    pub smax: usize,
    /// `‖e^{−α_c a*b*} Ψ_{p,N}‖²` before normalization, truncated at `smax`.
    pub norms_sq: Vec<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl GramWitness {
    /// Smallest over largest singular value.
    pub fn relative_floor(&self) -> f64 {
        let first = self.singular_values[0];
        self.singular_values.last().copied().unwrap_or(0.0) / first
    }

    /// Numerical rank at threshold `1e-8` times the largest singular value.
    pub fn rank(&self) -> usize {
        let cut = 1e-8 * self.singular_values[0];
        self.singular_values.iter().filter(|s| **s > cut).count()
    }
}

/// `v_N = e^{−α_c a*b*} Ψ_{p,N}` for `N = 0..=nmax` on the ladder `p`,
/// truncated at `smax`, unnormalized.
pub fn transported_family(p: usize, y: f64, nmax: usize, smax: usize) -> Result<Vec<LadderState>> {
    if !(y > 0.0 && y < 0.5) {
        return invalid(format!("y must lie in (0, 1/2), got {y}"));
    }
    let (ac, yt) = (alpha_c(y)?, ytilde(y)?);
    (0..=nmax)
        .map(|n| {
            let psi = psi_p_theta(&EigenstateSpec::new(p, C64::new(n as f64, 0.0), yt, n), false)?;
            Ok(apply_exp_pair(&psi, -ac, smax))
        })
        .collect()
}

/// Singular values of the Gram matrix of the normalized `v_N`.
pub fn gram_witness(p: usize, y: f64, nmax: usize, smax: usize) -> Result<GramWitness> {
    if smax < 10 * nmax.max(1) {
        return invalid(format!("smax must be at least 10 * nmax, got smax = {smax}, nmax = {nmax}"));
    }
    if nmax >= 64 {
        return invalid("nmax must be below 64");
    }
    let vs = transported_family(p, y, nmax, smax)?;
    let norms_sq: Vec<f64> = vs.iter().map(|v| v.norm_sqr()).collect();
    let unit: Vec<LadderState> = vs.iter().map(|v| v.normalized()).collect();
    let gram: Vec<Vec<f64>> = unit.iter().map(|u| unit.iter().map(|v| inner(u, v).re).collect()).collect();
    let singular_values = svd_small(&gram)?;
    Ok(GramWitness { p, y, nmax, smax, norms_sq, singular_values })
}

/// Squared norm of the projection of the unit vector `f / ‖f‖` onto
/// `span{v_0..v_N}`, for every `N ≤ nmax` (modified Gram-Schmidt).
pub fn span_projection(p: usize, y: f64, nmax: usize, smax: usize, f: &LadderState) -> Result<Vec<f64>> {
    if f.p() != p {
        return Ok(vec![0.0; nmax + 1]);
    }
    let f = f.resized(smax + 1).normalized();
    let mut basis: Vec<LadderState> = Vec::new();
    let mut captured = 0.0;
    let mut out = Vec::with_capacity(nmax + 1);
    for v in transported_family(p, y, nmax, smax)? {
        let mut w = v.normalized();
        for _ in 0..2 {
            for q in &basis {
                w = w.axpy(-inner(q, &w), q);
            }
        }
        let nw = w.norm();
        if nw > 1e-12 {
            let q = w.scaled(C64::new(1.0 / nw, 0.0));
            captured += inner(&q, &f).norm_sqr();
            basis.push(q);
        }
        out.push(captured);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::y_from_ytilde;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn hyp_examples() {
        let z = C64::new(0.37, -0.2);
        assert_eq!(hyp_f(-3.0, 0.0, 2.5, z).unwrap(), c(1.0));
        assert_eq!(hyp_f(1.7, 0.0, 2.5, z).unwrap(), c(1.0));
        assert!((hyp_f(-1.0, -1.0, 1.0, z).unwrap() - (z + 1.0)).norm() < 1e-16);
        assert!((hyp_f(-2.0, -1.0, 1.0, z).unwrap() - (z * 2.0 + 1.0)).norm() < 1e-16);
        assert!(hyp_f(0.5, 0.5, 1.0, z).is_err());
        assert!(hyp_f(-3.0, 1.0, -1.0, z).is_err());
        // c = −3 is fine when the series stops at degree 2.
        assert!(hyp_f(-2.0, 1.0, -3.0, z).is_ok());
    }

    #[test]
    fn contiguous_examples() {
        assert!(contiguous_residual(1, 1, 0, c(0.7)).unwrap().norm() < 1e-15);
        for n in 0..5 {
            assert!(contiguous_residual(0, n, 2, c(1.3)).unwrap().norm() < 1e-15);
        }
        assert!(contiguous_residual(2, 0, 1, c(0.3)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn contiguous_grid() {
        let zs = [c(0.3), c(0.7), c(1.5), c(-0.4), C64::new(0.2, 0.5)];
        for m in 0..=6 {
            for n in 0..=6 {
                for p in 0..=6 {
                    for z in zs {
                        let r = contiguous_residual(m, n, p, z).unwrap().norm();
                        assert!(r <= 1e-12, "m={m} n={n} p={p} z={z} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative_residual(-1, 0.0, 1.0, c(2.0)).unwrap(), c(0.0));
        assert!(derivative_residual(-1, -1.0, 1.0, c(2.0)).unwrap().norm() <= 1e-13);
        assert!(derivative_residual(-3, -2.0, 2.0, c(1.5)).unwrap().norm() <= 1e-13);
        assert!(derivative_residual(1, -2.0, 2.0, c(1.5)).is_err());
    }

    #[test]
    fn exponent_sign_matters() {
        assert_relative_eq!(flipped_exponent_residual(-1, -1.0, 1.0, 2.0).unwrap().abs(), 0.25, max_relative = 1e-14);
        assert_eq!(flipped_exponent_residual(-2, 0.0, 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_grid() {
        let zs = [c(0.7), c(1.5), c(-2.0), C64::new(0.3, 0.9)];
        for a in -5..=-1 {
            for b in [0.0, -1.0, -2.0] {
                for cc in [1.0, 2.0, 3.5] {
                    for z in zs {
                        let r = derivative_residual(a, b, cc, z).unwrap().norm();
                        assert!(r <= 1e-13, "a={a} b={b} c={cc} z={z} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn f_family_examples() {
        let z = C64::new(0.4, 0.1);
        for n in 0..4 {
            assert_eq!(f_family(n, 2, 0.7, &[c(1.0), c(0.0), c(0.0)], z).unwrap(), c(1.0));
        }
        let d = [C64::new(0.5, 0.2), c(-1.0), c(0.3)];
        let f0 = f_family(0, 1, 0.9, &d, z).unwrap();
        let direct: C64 = d.iter().enumerate().map(|(m, dm)| dm.conj() * binomial(1 + m, m).sqrt() * z.powi(m as i32)).sum();
        assert!((f0 - direct).norm() < 1e-15);
        let f1 = f_family(1, 0, 1.0, &[c(0.0), c(1.0)], z).unwrap();
        assert!((f1 - (z + 1.0)).norm() < 1e-15);
        assert!(f_family(1, 0, 1.0, &[c(1.0)], c(0.0)).is_err());
    }

    #[test]
    fn f_recurrence_examples() {
        assert!(f_recurrence_residual(0, 0, 1.0, &[c(1.0)], c(0.4)).unwrap() < 1e-15);
        assert!(f_recurrence_residual(1, 0, 1.0, &[c(0.0), c(1.0)], c(0.4)).unwrap() < 1e-15);
    }

    #[test]
    fn f_recurrence_sweep() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(0..=4);
            let p = rng.gen_range(0..=4);
            let yt = rng.gen_range(0.3..2.5);
            let d: Vec<C64> = (0..rng.gen_range(1..12)).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            for _ in 0..20 {
                let r = rng.gen_range(0.05..0.95);
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                let z = C64::from_polar(r, th);
                assert!(f_recurrence_residual(n, p, yt, &d, z).unwrap() <= 1e-11);
            }
        }
    }

    #[test]
    fn gram_examples() {
        let y = 0.3;
        let w = gram_witness(0, y, 0, 60).unwrap();
        assert_eq!(w.singular_values.len(), 1);
        assert_relative_eq!(w.singular_values[0], 1.0, max_relative = 1e-14);
        let ac = alpha_c(y).unwrap();
        assert_relative_eq!(w.norms_sq[0], 1.0 / (1.0 - ac * ac), max_relative = 1e-12);

        let y = y_from_ytilde(1.0).unwrap();
        let w = gram_witness(0, y, 3, 60).unwrap();
        assert!(w.singular_values.iter().all(|s| *s > 0.0));
        assert_eq!(w.rank(), 4);

        let w = gram_witness(0, 1.0 / 8f64.sqrt(), 3, 60).unwrap();
        assert!(w.singular_values.iter().all(|s| *s > 0.0));
        assert_eq!(w.rank(), 4);

        let a = transported_family(0, 0.45, 3, 60).unwrap();
        let b = transported_family(1, 0.45, 3, 60).unwrap();
        for u in &a {
            for v in &b {
                assert_eq!(inner(u, v), c(0.0));
            }
        }
        assert!(gram_witness(0, 0.45, 4, 20).is_err());
    }

    #[test]
    fn projections_grow_with_family_size() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let f = LadderState::from_real(0, &(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let proj = span_projection(0, 0.45, 8, 160, &f).unwrap();
        for w in proj.windows(2) {
            assert!(w[1] >= w[0] - 1e-14);
        }
        assert!(proj[8] > proj[0]);
        assert!(proj[8] <= 1.0 + 1e-12);
    }

    proptest! {
        #[test]
        fn contiguous_random_z(m in 0usize..8, n in 0usize..8, p in 0usize..8, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            prop_assert!(contiguous_residual(m, n, p, C64::new(re, im)).unwrap().norm() <= 1e-12);
        }
    }
}
