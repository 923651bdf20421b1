//! `exp(β a*b*)` on ladder states, a numerical domain test for the
//! unbounded transform, the conjugation identity for `P = −α a*b*`, and
//! the per-mode ground state `exp(−P)|vac⟩ = Σ α^n |n, n⟩`.
//!
//! In rescaled coordinates `C_s = sqrt(s!/(p+s)!) c_s` the pair creator acts
//! as `C_m ← m C_{m−1}`, so `exp(β a*b*)` becomes the binomial convolution
//! `C'_m = Σ_s C(m, s) β^{m−s} C_s`. We evaluate it as `(shift + β)^m`
//! applied to `C`, which needs no binomials and no factorials.

use num_bigint::BigInt;
use num_traits::{Float, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::ladder::{LadderState, C64};
use crate::special::{ln_rescale_factor, log_sum_exp, rescale_factor};

/// Rescaled coordinates `C_s` of a ladder state.
pub fn to_rescaled(st: &LadderState) -> Vec<C64> {
    st.coeffs().iter().enumerate().map(|(s, c)| c * rescale_factor(st.p(), s)).collect()
}

/// Inverse of [`to_rescaled`].
pub fn from_rescaled(p: usize, mirror: bool, big_c: &[C64]) -> LadderState {
    LadderState::new(p, mirror, big_c.iter().enumerate().map(|(s, c)| c / rescale_factor(p, s)).collect())
}

/// `C'_m = Σ_{s≤m} C(m, s) β^{m−s} C_s` for `m = 0..=smax`.
pub fn binomial_convolution(big_c: &[C64], beta: f64, smax: usize) -> Vec<C64> {
    // u^{(k)}_j = Σ_i C(k, i) β^{k−i} C_{j+i};  C'_m = u^{(m)}_0.
    let mut u: Vec<C64> = (0..=smax).map(|j| big_c.get(j).copied().unwrap_or_default()).collect();
    let mut out = Vec::with_capacity(smax + 1);
    for k in 0..=smax {
        out.push(u[0]);
        if k == smax {
            break;
        }
        let live = smax - k;
        for j in 0..live {
            u[j] = u[j + 1] + u[j] * beta;
        }
        u.truncate(live);
    }
    out
}

/// `exp(β a*b*) st`, truncated at `smax`. `β = −α` implements
/// `exp(−α a*b*)`.
pub fn apply_exp_pair(st: &LadderState, alpha_signed: f64, smax: usize) -> LadderState {
    let big = to_rescaled(st);
    let out = binomial_convolution(&big, alpha_signed, smax);
    from_rescaled(st.p(), st.mirror(), &out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainVerdict {
    InDomain,
    NotInDomain,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainReport {
    pub verdict: DomainVerdict,
    /// Least-squares slope of `ln|c'_m|` against `m` over the last half.
    pub log_growth: f64,
    /// `ln Σ_{m≤H} |c'_m|²`.
    pub log_norm_sq: f64,
    /// Share of the partial norm added over the last tenth of the horizon.
    pub last_decade_increment: f64,
    /// `ln|c'_m|` for `m = 0..=horizon`.
    pub log_coeffs: Vec<f64>,
}

const CAUCHY_TOL: f64 = 1e-10;
const GROWTH_BAND: f64 = 1e-3;

/// Decides numerically whether `exp(−α a*b*)` maps the state with rescaled
/// coefficients `rule(s)` into ℓ².
///
/// The convolution alternates in sign for `α > 0` and cancels
/// catastrophically in floating point, so it is carried out exactly on the
/// dyadic values of `rule(s)` and `α` with big integers. Only the final
/// magnitudes are rounded.
pub fn domain_check(rule: impl Fn(usize) -> f64, alpha: f64, p: usize, horizon: usize) -> Result<DomainReport> {
    if horizon < 100 {
        return invalid(format!("horizon must be >= 100, got {horizon}"));
    }
    if !alpha.is_finite() {
        return invalid("alpha must be finite");
    }
    let values: Vec<f64> = (0..=horizon).map(&rule).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return invalid("coefficient rule produced a non-finite value");
    }
    let log_big = exact_log_convolution(&values, -alpha);
    let log_coeffs: Vec<f64> = log_big.iter().enumerate().map(|(m, l)| l - ln_rescale_factor(p, m)).collect();

    let mut partial = Vec::with_capacity(log_coeffs.len());
    let mut acc = f64::NEG_INFINITY;
    for l in &log_coeffs {
        acc = log_sum_exp([acc, 2.0 * l]);
        partial.push(acc);
    }
    let total = acc;
    let decade = horizon - horizon / 10;
    let last_decade_increment = if total == f64::NEG_INFINITY {
        0.0
    } else {
        1.0 - (partial[decade] - total).exp()
    };

    let tail: Vec<(f64, f64)> = log_coeffs[horizon / 2..]
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_finite())
        .map(|(i, l)| ((horizon / 2 + i) as f64, *l))
        .collect();
    let log_growth = if tail.len() >= 2 { slope(&tail) } else { f64::NEG_INFINITY };

    let verdict = if tail.is_empty() || last_decade_increment < CAUCHY_TOL {
        DomainVerdict::InDomain
    } else if log_growth > GROWTH_BAND {
        DomainVerdict::NotInDomain
    } else if log_growth < -GROWTH_BAND {
        // Geometric decay that has not yet met the Cauchy test: bound the
        // remainder by the geometric tail of the last term.
        let q = (2.0 * log_growth).exp();
        let last = 2.0 * log_coeffs[horizon];
        let rest = last + (q / (1.0 - q)).ln() - total;
        if rest < CAUCHY_TOL.ln() {
            DomainVerdict::InDomain
        } else {
            DomainVerdict::Inconclusive
        }
    } else {
        DomainVerdict::Inconclusive
    };
    Ok(DomainReport { verdict, log_growth, log_norm_sq: total, last_decade_increment, log_coeffs })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `(mantissa, exponent)` with `x = mantissa · 2^exponent` exactly.
fn dyadic(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let (m, e, sign) = x.integer_decode();
    let mut m = BigInt::from(m);
    if sign < 0 {
        m = -m;
    }
    (m, e as i64)
}

fn ln_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln|Σ_s C(m,s) β^{m−s} C_s|` for `m < values.len()`, exactly.
fn exact_log_convolution(values: &[f64], beta: f64) -> Vec<f64> {
    let decoded: Vec<(BigInt, i64)> = values.iter().map(|&v| dyadic(v)).collect();
    let min_exp = decoded.iter().filter(|(m, _)| !m.is_zero()).map(|(_, e)| *e).min().unwrap_or(0);
    // Common scale 2^{min_exp}: N_j = C_j 2^{−min_exp}.
    let mut n: Vec<BigInt> = decoded.iter().map(|(m, e)| m << (e - min_exp) as usize).collect();
    let (mut b_int, b_exp) = dyadic(beta);
    let mut b_shift = 0usize;
    if !b_int.is_zero() && b_exp < 0 {
        b_shift = (-b_exp) as usize;
    } else if !b_int.is_zero() {
        b_int <<= b_exp as usize;
    }
    // N^{(k+1)}_j = N^{(k)}_{j+1} 2^{b_shift} + B N^{(k)}_j, scale 2^{min_exp − k b_shift}.
    let len = values.len();
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let scale = (min_exp - (k * b_shift) as i64) as f64 * std::f64::consts::LN_2;
        out.push(ln_abs(&n[0]) + scale);
        if k + 1 == len {
            break;
        }
        let live = len - 1 - k;
        for j in 0..live {
            let next = (&n[j + 1] << b_shift) + &b_int * &n[j];
            n[j] = next;
        }
        n.truncate(live);
    }
    out
}

/// Largest entrywise deviation between `exp(−P) a exp(P)` and `a − α b*`,
/// `P = −α a*b*`, as maps from the `p = 1` ladder to the `p = 0` ladder,
/// over rows `≤ smax − 2`.
///
/// Both sides are assembled in rescaled coordinates, where `exp(β a*b*)` is
/// the integer matrix `C(m, s)` times `β^{m−s}`, `a` is `diag(s+1)` and `b*`
/// is `(s+1)` on the subdiagonal. Entry `(i, j)` of the triple product is then
/// `α^{i−j}` times an exact integer sum, and is mapped back to the ladder
/// basis through the diagonal rescalings. The alternating sums that make a
/// floating-point product lose digits at large `α` are done in integers.
pub fn conjugation_check(alpha: f64, smax: usize) -> Result<f64> {
    if smax < 4 {
        return invalid(format!("smax must be >= 4, got {smax}"));
    }
    if !alpha.is_finite() {
        return invalid("alpha must be finite");
    }
    let d = smax + 1;
    let binom = pascal(d);
    let mut dev = 0.0f64;
    for i in 0..=smax - 2 {
        for j in 0..=i {
            // Σ_k C(i,k) α^{i−k} (k+1) C(k,j) (−α)^{k−j}
            let mut acc = BigInt::zero();
            for k in j..=i {
                let term = &binom[i][k] * &binom[k][j] * BigInt::from(k + 1);
                if (k - j) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            let lhs = acc.to_f64().expect("finite") * alpha.powi((i - j) as i32);
            let rhs = if i == j {
                (j + 1) as f64
            } else if i == j + 1 {
                -alpha * (j + 1) as f64
            } else {
                0.0
            };
            // Back to the ladder basis: the p = 1 rescaling divides column j by sqrt(j+1).
            let scale = ((j + 1) as f64).sqrt();
            dev = dev.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(dev)
}

fn pascal(d: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    for n in 0..d {
        let mut row = vec![BigInt::from(1u32); n + 1];
        for k in 1..n {
            row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
        }
        rows.push(row);
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub state: LadderState,
    /// `Σ_n α^{2n}` of the truncated, unnormalized state.
    pub norm_sq: f64,
    /// `⟨a*a⟩` of the normalized truncated state.
    pub occupancy: f64,
}

/// `exp(−P)|vac⟩` on one mode pair, `c_n = α^n`, truncated at `smax`.
pub fn mode_ground_state(alpha: f64, smax: usize, normalize: bool) -> Result<GroundState> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    let mut coeffs = Vec::with_capacity(smax + 1);
    let mut c = 1.0f64;
    for n in 0..=smax {
        if n > 0 {
            c *= alpha;
        }
        coeffs.push(C64::new(c, 0.0));
    }
    let (norm_sq, occupancy) = if alpha == 0.0 {
        (1.0, 0.0)
    } else {
        let l2 = 2.0 * alpha.ln();
        let ln_norm = log_sum_exp((0..=smax).map(|n| n as f64 * l2));
        let ln_num = log_sum_exp((1..=smax).map(|n| (n as f64).ln() + n as f64 * l2));
        (ln_norm.exp(), (ln_num - ln_norm).exp())
    };
    let mut state = LadderState::new(0, false, coeffs);
    if normalize {
        state = state.scaled(C64::new(1.0 / norm_sq.sqrt(), 0.0));
    }
    Ok(GroundState { state, norm_sq, occupancy })
}
