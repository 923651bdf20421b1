//! `H_ab^(α) = ½(a*a + b*b) + y1 ab + y2 a*b*` on a single ladder, its
//! tridiagonal matrix, and the analytic Bogoliubov energies.
//!
//! With `y1 = y2 = y` this is `H_ab(y)`; with `y2 = 0` it is the
//! upper-bidiagonal operator obtained at the critical amplitude.
//!
//! Two readings of the Bogoliubov level spacing circulate: `(n_a + n_b)
//! sqrt(1 - 4y²)` and the `½ sqrt(1 - 4y²)` per quantum implied by
//! `H_ab(y)` itself. [`bog_energy_ab`] returns the second, which the dense
//! diagonalization of `H_ab(y)` reproduces; the first holds for the per-mode
//! LHY block once the `2(k² + 8πaρ)` prefactor is applied (see
//! [`lhy_block`]).

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::ladder::{apply_ab, apply_adbd, apply_halfnumber, LadderState, C64};
use crate::lattice::{radical, ModeParams, ModelParams};

/// `(½N + y1 ab + y2 a*b*) st`. The output is one index longer than `st`.
pub fn apply_hab_alpha(st: &LadderState, y1: f64, y2: f64) -> LadderState {
    let n = apply_halfnumber(st);
    let lower = apply_ab(st);
    let raise = apply_adbd(st);
    let len = st.len() + 1;
    let coeffs = (0..len)
        .map(|s| n.get(s) + lower.get(s) * y1 + raise.get(s) * y2)
        .collect();
    LadderState::new(st.p(), st.mirror(), coeffs)
}

/// Tridiagonal matrix of `H_ab^(α)` on `{|p+s, s⟩ : s = 0..=smax}`.
///
/// Row `s` reads `d_s c_s + u_s c_{s+1} + l_s c_{s-1}`; `upper[s]` couples
/// `s` to `s+1` and `lower[s]` couples `s+1` to `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HabMatrix {
    pub p: usize,
    pub y1: f64,
    pub y2: f64,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl HabMatrix {
    pub fn smax(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.upper == self.lower
    }

    /// Matrix-vector product on the truncated space.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match matrix dimension");
        (0..n)
            .map(|s| {
                let mut acc = v[s] * self.diag[s];
                if s + 1 < n {
                    acc += v[s + 1] * self.upper[s];
                }
                if s > 0 {
                    acc += v[s - 1] * self.lower[s - 1];
                }
                acc
            })
            .collect()
    }

    /// Dense row-major copy, mainly for tests and small referees.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for s in 0..n {
            m[s][s] = self.diag[s];
            if s + 1 < n {
                m[s][s + 1] = self.upper[s];
                m[s + 1][s] = self.lower[s];
            }
        }
        m
    }
}

pub fn build_tridiagonal(p: usize, y1: f64, y2: f64, smax: usize) -> Result<HabMatrix> {
    if smax < 1 {
        return invalid(format!("smax must be >= 1, got {smax}"));
    }
    if !y1.is_finite() || !y2.is_finite() {
        return invalid("couplings must be finite");
    }
    let pf = p as f64;
    let diag = (0..=smax).map(|s| pf / 2.0 + s as f64).collect();
    let upper = (0..smax)
        .map(|s| {
            let s = s as f64;
            y1 * ((pf + s + 1.0) * (s + 1.0)).sqrt()
        })
        .collect();
    let lower = (0..smax)
        .map(|s| {
            let s = (s + 1) as f64;
            y2 * ((pf + s) * s).sqrt()
        })
        .collect();
    Ok(HabMatrix { p, y1, y2, diag, upper, lower })
}

/// `E = sqrt(1 - 4y²)(n + p/2 + ½) − ½`, the level of `H_ab(y)` with `n`
/// pairs above the bottom of ladder `p`.
pub fn bog_energy_ab(y: f64, p: usize, n: usize) -> Result<f64> {
    if !(0.0..0.5).contains(&y) {
        return invalid(format!("coupling y must lie in [0, 1/2), got {y}"));
    }
    Ok(radical(y) * (n as f64 + p as f64 / 2.0 + 0.5) - 0.5)
}

/// One `(k, -k)` block of the quadratic LHY Hamiltonian, with the
/// `4πaρN` and `Σα` constants left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockEnergy {
    /// `2(k² + 8πaρ) E_ab(y(k), p, n)`.
    pub total: f64,
    /// Level above the per-mode ground, `(2n + p) ε_k`.
    pub excitation: f64,
}

pub fn lhy_block(mp: &ModelParams, mode: &ModeParams, p: usize, n: usize) -> Result<BlockEnergy> {
    let scale = 2.0 * mode.bracket_scale(mp);
    let total = scale * bog_energy_ab(mode.y, p, n)?;
    let ground = scale * bog_energy_ab(mode.y, 0, 0)?;
    Ok(BlockEnergy { total, excitation: total - ground })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mode_params, Momentum};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn re(v: &LadderState) -> Vec<f64> {
        v.coeffs().iter().map(|c| c.re).collect()
    }

    #[test]
    fn hab_examples() {
        let out = apply_hab_alpha(&LadderState::from_real(0, &[1.0, 1.0]), 0.0, 0.0);
        assert_eq!(re(&out), vec![0.0, 1.0, 0.0]);

        let yt = 0.7;
        let st = LadderState::from_real(0, &[1.0, 1.0 / yt]);
        let out = apply_hab_alpha(&st, yt, 0.0);
        assert!(out.max_abs_diff(&st) < 1e-15);

        let out = apply_hab_alpha(&LadderState::from_real(0, &[1.0]), 0.3, 0.3);
        assert_eq!(re(&out), vec![0.0, 0.3]);
    }

    #[test]
    fn tridiagonal_examples() {
        let m = build_tridiagonal(0, 0.3, 0.3, 1).unwrap();
        assert_eq!(m.to_dense(), vec![vec![0.0, 0.3], vec![0.3, 1.0]]);

        let m = build_tridiagonal(2, 0.1, 0.1, 1).unwrap();
        let d = m.to_dense();
        assert_eq!(d[0][0], 1.0);
        assert_eq!(d[1][1], 2.0);
        assert_relative_eq!(d[0][1], 0.1 * 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(d[1][0], 0.1 * 3f64.sqrt(), max_relative = 1e-15);

        let m = build_tridiagonal(0, 0.4, 0.0, 5).unwrap();
        assert!(m.lower.iter().all(|&x| x == 0.0));
        assert_eq!(m.diag, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);

        assert!(build_tridiagonal(0, 0.1, 0.1, 0).is_err());
    }

    #[test]
    fn symmetric_at_zero_alpha() {
        assert!(build_tridiagonal(3, 0.2, 0.2, 10).unwrap().is_symmetric());
        assert!(!build_tridiagonal(3, 0.2, 0.1, 10).unwrap().is_symmetric());
    }

    #[test]
    fn bog_energy_values() {
        assert_relative_eq!(bog_energy_ab(0.3, 0, 0).unwrap(), -0.1, max_relative = 1e-14);
        assert_relative_eq!(bog_energy_ab(0.3, 0, 1).unwrap(), 0.7, max_relative = 1e-14);
        for p in 0..4 {
            for n in 0..4 {
                assert_eq!(bog_energy_ab(0.0, p, n).unwrap(), n as f64 + p as f64 / 2.0);
            }
        }
        assert!(bog_energy_ab(0.5, 0, 0).is_err());
    }

    #[test]
    fn lhy_block_excitations() {
        let mp = ModelParams::new(1.0 / (16.0 * PI), 1.0, 2.0 * PI).unwrap();
        let mode = mode_params(&mp, &Momentum::new([1, 0, 0], mp.l)).unwrap();
        let e = lhy_block(&mp, &mode, 1, 0).unwrap();
        assert_relative_eq!(e.excitation, 2f64.sqrt(), max_relative = 1e-13);
        let e = lhy_block(&mp, &mode, 0, 1).unwrap();
        assert_relative_eq!(e.excitation, 2.0 * 2f64.sqrt(), max_relative = 1e-13);

        let free = ModelParams::new(0.0, 1.0, 2.0 * PI).unwrap();
        let mode = mode_params(&free, &Momentum::new([1, 1, 0], free.l)).unwrap();
        for (p, n) in [(0, 1), (2, 3), (1, 0)] {
            let e = lhy_block(&free, &mode, p, n).unwrap();
            assert_relative_eq!(e.excitation, (2 * n + p) as f64 * 2.0, max_relative = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn matrix_matches_operator(
            p in 0usize..6,
            y1 in 0.0f64..1.5,
            y2 in 0.0f64..0.5,
            coeffs in prop::collection::vec(-1.0f64..1.0, 2..20),
        ) {
            let st = LadderState::from_real(p, &coeffs);
            let m = build_tridiagonal(p, y1, y2, st.len() - 1).unwrap();
            let dense = m.apply(st.coeffs());
            let op = apply_hab_alpha(&st, y1, y2);
            // Rows at and beyond smax feel the truncation.
            for s in 0..st.len() - 1 {
                prop_assert!((dense[s] - op.get(s)).norm() < 1e-13 * (1.0 + dense[s].norm()));
            }
        }
    }
}
