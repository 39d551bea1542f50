//! Summation helpers and the tolerances used by the verification suites.
//!
//! All identities checked by this crate are exact over the underlying finite
//! structures; the tolerances below are floating-point policy only.

use num_complex::Complex64;

/// Absolute tolerance for float-vs-exact comparisons (character sums,
/// convolution route equivalence, closed-form checks) at q <= 121.
pub const TOL_ABS: f64 = 1e-9;

/// Relative tolerance for sharp-constant equality checks.
pub const TOL_REL: f64 = 1e-9;

/// Absolute tolerance for exact character cancellations at q <= 25.
pub const TOL_CHAR_CANCEL: f64 = 1e-12;

/// Margin for strict-inequality (perturbation) checks.
pub const TOL_STRICT: f64 = 1e-12;

/// Convergence margin for local search.
pub const TOL_SEARCH: f64 = 1e-6;

/// Tolerance for finite-difference derivative checks of the functionals.
pub const TOL_DERIV: f64 = 1e-6;

/// Tolerance for the analytic-gradient vs finite-difference validation.
pub const TOL_GRAD_FD: f64 = 1e-5;

/// Relative tolerance for ratio scale invariance.
pub const TOL_SCALE_INV: f64 = 1e-12;

const PAIRWISE_CHUNK: usize = 32;

/// Pairwise (tree) sum of complex terms produced by `term`.
///
/// Deterministic for a fixed `n`, independent of any outer parallelism.
pub fn pairwise_sum_c(n: usize, term: &impl Fn(usize) -> Complex64) -> Complex64 {
    fn go(lo: usize, hi: usize, term: &impl Fn(usize) -> Complex64) -> Complex64 {
        if hi - lo <= PAIRWISE_CHUNK {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        go(0, n, term)
    }
}

/// Pairwise (tree) sum of real terms.
pub fn pairwise_sum_f(n: usize, term: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, term: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= PAIRWISE_CHUNK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    if n == 0 {
        0.0
    } else {
        go(0, n, term)
    }
}

/// `(sum_i |v_i|^e)^(1/e)` for even `e`, accumulated with the terms scaled by
/// the largest modulus so that exponent 6 cannot overflow.
pub fn scaled_lp_norm(values: &[Complex64], exponent: u32) -> f64 {
    assert!(
        matches!(exponent, 2 | 4 | 6),
        "only even exponents 2, 4, 6 are supported"
    );
    let max_sq = values.iter().map(|z| z.norm_sqr()).fold(0.0f64, f64::max);
    if max_sq == 0.0 {
        return 0.0;
    }
    let half = (exponent / 2) as i32;
    let sum = pairwise_sum_f(values.len(), &|i| {
        (values[i].norm_sqr() / max_sq).powi(half)
    });
    max_sq.sqrt() * sum.powf(1.0 / f64::from(exponent))
}

/// Relative gap `|a - b| / max(1, |b|)`.
pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = xs.iter().sum();
        let tree = pairwise_sum_f(xs.len(), &|i| xs[i]);
        assert!((naive - tree).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_of_ones() {
        let v = vec![Complex64::new(1.0, 0.0); 125];
        assert!((scaled_lp_norm(&v, 4) - 125f64.powf(0.25)).abs() < 1e-12);
        assert!((scaled_lp_norm(&v, 2) - 125f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_zero_vector() {
        let v = vec![Complex64::new(0.0, 0.0); 8];
        assert_eq!(scaled_lp_norm(&v, 6), 0.0);
    }
}
