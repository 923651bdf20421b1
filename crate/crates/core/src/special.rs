//! Scalar special functions: log-gamma, log-factorials, binomials.
//!
//! Everything here is real-valued. The generalized binomial for complex
//! upper argument lives in [`crate::eigenstates`], where it is built as a
//! finite product.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` for real `x`, together with the sign of `Γ(x)`.
///
/// Lanczos (g = 7, n = 9) for `x >= 0.5`, reflection below. Poles at the
/// nonpositive integers return `(+inf, 1.0)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 1.0);
    }
    if x < 0.5 {
        // Γ(x) Γ(1-x) = π / sin(πx)
        let s = (PI * x).sin();
        let (lg, sg) = ln_gamma_signed(1.0 - x);
        let sign = if s < 0.0 { -sg } else { sg };
        return (PI.ln() - s.abs().ln() - lg, sign);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let lg = 0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln();
    (lg, 1.0)
}

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

/// `Γ(x)` for moderate arguments.
pub fn gamma(x: f64) -> f64 {
    let (lg, s) = ln_gamma_signed(x);
    s * lg.exp()
}

/// `ln(n!)`, exact summation up to 30 and log-gamma beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 30 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Ordinary binomial coefficient as a float. Exact for results below 2^53.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut acc = 1.0;
        for j in 0..k {
            acc = acc * (n - j) as f64 / (j + 1) as f64;
        }
        acc.round()
    } else {
        ln_binomial(n, k).exp()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// `sqrt(s! / (p+s)!)`, the ladder-to-generating-function rescaling.
pub fn rescale_factor(p: usize, s: usize) -> f64 {
    if p + s <= 30 {
        let mut acc = 1.0;
        for j in (s + 1)..=(s + p) {
            acc /= j as f64;
        }
        acc.sqrt()
    } else {
        (0.5 * (ln_factorial(s) - ln_factorial(p + s))).exp()
    }
}

/// `ln sqrt(s! / (p+s)!)`.
pub fn ln_rescale_factor(p: usize, s: usize) -> f64 {
    0.5 * (ln_factorial(s) - ln_factorial(p + s))
}

/// Numerically stable `ln(Σ exp(x_i))` over the finite entries.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().filter(|x| !x.is_nan()).collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_half_integers() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(-1.5), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn ln_gamma_large_matches_factorials() {
        let exact: f64 = (1..=170).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(ln_gamma(171.0), exact, max_relative = 1e-13);
        assert_relative_eq!(ln_factorial(170), exact, max_relative = 1e-13);
    }

    #[test]
    fn gamma_poles() {
        assert!(ln_gamma(0.0).is_infinite());
        assert!(ln_gamma(-3.0).is_infinite());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_relative_eq!(binomial(100, 50), 1.008_913_445_455_641_9e29, max_relative = 1e-11);
    }

    #[test]
    fn rescale_consistent_across_threshold() {
        for p in 0..5 {
            for s in 25..35 {
                assert_relative_eq!(
                    rescale_factor(p, s),
                    ln_rescale_factor(p, s).exp(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(-2.0, 2), 2.0);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
    }
}
