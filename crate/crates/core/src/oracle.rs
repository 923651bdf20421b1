//! Dense referees: a symmetric tridiagonal eigensolver (implicit-shift QL),
//! the diagonal similarity that symmetrizes `H_ab^(α)` for `0 ≤ α < α_c`,
//! and a one-sided Jacobi SVD for small matrices.
//!
//! Nothing in here knows about ladders or generating functions; it only
//! sees numbers, which is what makes it a useful cross-check.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hamiltonians::HabMatrix;

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[j]` belongs to `values[j]`, unit norm. Empty unless requested.
    pub vectors: Vec<Vec<f64>>,
}

/// Eigenvalues (and optionally eigenvectors) of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `offdiag`
/// (`offdiag[i]` couples `i` and `i+1`).
pub fn sym_tridiag_eig(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return invalid("empty matrix");
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Dimension { expected: n - 1, got: offdiag.len() });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = if want_vectors {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element to split at.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence(MAX_QL_SWEEPS));
            }
            // Wilkinson-style shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_vectors {
                    for row in z.iter_mut() {
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = if want_vectors {
        order.iter().map(|&j| z.iter().map(|row| row[j]).collect()).collect()
    } else {
        Vec::new()
    };
    Ok(TridiagEigen { values, vectors })
}

/// Symmetric form of a tridiagonal `H_ab^(α)` with `y1, y2 > 0`, plus the
/// range of the similarity scaling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symmetrized {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    /// `ln` of the smallest and largest diagonal similarity entries
    /// (first entry fixed at 1). A wide spread means the eigenvectors of the
    /// original matrix are badly scaled.
    pub log_scale_min: f64,
    pub log_scale_max: f64,
}

/// `D^{-1} M D` with `D` diagonal, chosen so that the off-diagonals become
/// `sqrt(upper_s lower_s) = sqrt(y1 y2) sqrt((p+s+1)(s+1))`.
pub fn symmetrize_tridiag(m: &HabMatrix) -> Result<Symmetrized> {
    if !(m.y1 > 0.0 && m.y2 > 0.0) {
        return invalid(format!(
            "symmetrization needs y1, y2 > 0 (got {}, {}); read the spectrum off the diagonal instead",
            m.y1, m.y2
        ));
    }
    let offdiag: Vec<f64> = m.upper.iter().zip(&m.lower).map(|(u, l)| (u * l).sqrt()).collect();
    // d_{s+1} / d_s = sqrt(lower_s / upper_s)
    let mut log_d = 0.0f64;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for (u, l) in m.upper.iter().zip(&m.lower) {
        log_d += 0.5 * (l.ln() - u.ln());
        lo = lo.min(log_d);
        hi = hi.max(log_d);
    }
    Ok(Symmetrized { diag: m.diag.clone(), offdiag, log_scale_min: lo, log_scale_max: hi })
}

/// Eigenvalues of a tridiagonal `H_ab^(α)` for `0 ≤ α ≤ α_c`: by
/// symmetrization when `y2 > 0`, by diagonal read-off when `y2 = 0`.
pub fn hab_eigenvalues(m: &HabMatrix) -> Result<Vec<f64>> {
    if m.y2 == 0.0 || m.y1 == 0.0 {
        let mut v = m.diag.clone();
        v.sort_by(f64::total_cmp);
        return Ok(v);
    }
    let s = symmetrize_tridiag(m)?;
    Ok(sym_tridiag_eig(&s.diag, &s.offdiag, false)?.values)
}

const MAX_JACOBI_SWEEPS: usize = 80;

/// Singular values, descending, by one-sided Jacobi rotations on the
/// columns of a row-major `rows x cols` matrix.
pub fn svd_small(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let rows = matrix.len();
    if rows == 0 || matrix[0].is_empty() {
        return invalid("empty matrix");
    }
    let cols = matrix[0].len();
    if matrix.iter().any(|r| r.len() != cols) {
        return invalid("ragged matrix");
    }
    if rows > 64 || cols > 64 {
        return invalid(format!("svd_small handles at most 64x64, got {rows}x{cols}"));
    }
    // Work on columns of the (possibly transposed) matrix with more rows.
    let (m, n, mut a): (usize, usize, Vec<Vec<f64>>) = if rows >= cols {
        (rows, cols, (0..cols).map(|j| (0..rows).map(|i| matrix[i][j]).collect()).collect())
    } else {
        (cols, rows, matrix.to_vec())
    };

    for sweep in 0..=MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for j in 0..n {
            for k in (j + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    alpha += a[j][i] * a[j][i];
                    beta += a[k][i] * a[k][i];
                    gamma += a[j][i] * a[k][i];
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum().max(0.0).mul_add(2.0, -1.0) / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (a[j][i], a[k][i]);
                    a[j][i] = c * x - s * y;
                    a[k][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
        if sweep == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }
    let mut sv: Vec<f64> = a.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}
