//! Large-size behaviour: limits of the averaged error, the state-comparison
//! connection, and the exponential decay rate of the per-pair error.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::analytics::OverlapQ;
use crate::combinatorics::{binomial, factorial, rational_to_f64};
use crate::error::{check_range, Result};
use crate::quadrature::integrate;

mod figures;
mod rate;

pub use figures::Figure;
pub use rate::{ck_dkl, finite_size_rate, rate, rate_h, rate_minimizer, CkDkl, RateResult};

const LIMIT_TOL: f64 = 1e-13;

/// Averaged error as `N1 = N2 -> infinity`:
/// `(1 - (d-1) int_0^1 sqrt(1 - x^M) (1-x)^(d-2) dx) / 2`.
///
/// Integrated in `t` with `x = 1 - t^2`, which removes the square-root
/// singularity of the derivative at `x = 1`.
pub fn limit_n1_infinite(m: u64, d: u64) -> Result<f64> {
    check_range("M", m as i64, 1, i64::MAX)?;
    check_range("d", d as i64, 2, i64::MAX)?;
    let mf = m as f64;
    let e = 2 * (d as i32 - 2) + 1;
    let f = |t: f64| {
        let one_minus_xm = -(mf * (-t * t).ln_1p()).exp_m1();
        one_minus_xm.sqrt() * t.powi(e) * 2.0
    };
    let quad = integrate(f, 0.0, 1.0, LIMIT_TOL)?;
    Ok(0.5 * (1.0 - (d - 1) as f64 * quad.value))
}

/// Haar average over pairs of the optimal error for discriminating
/// `rho1^{⊗M}` from `rho2^{⊗M}`, integrated over the angle `q = cos^2 θ`.
pub fn discrimination_average(m: u64, d: u64) -> Result<f64> {
    check_range("d", d as i64, 2, i64::MAX)?;
    if m == 0 {
        return Ok(0.5);
    }
    let mf = m as f64;
    let e = 2 * d as i32 - 3;
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        let one_minus = -(2.0 * mf * c.ln()).exp_m1();
        one_minus.sqrt() * s.powi(e) * c
    };
    let quad = integrate(f, 0.0, FRAC_PI_2, LIMIT_TOL)?;
    Ok(0.5 * (1.0 - 2.0 * (d - 1) as f64 * quad.value))
}

/// `1 / (2 C(N2 + d - 1, d - 1))`, the averaged error as `M -> infinity`.
pub fn limit_m_infinite_exact(n2: u64, d: u64) -> Result<BigRational> {
    check_range("d", d as i64, 2, i64::MAX)?;
    let c = BigInt::from(binomial(n2 + d - 1, d as i64 - 1).into_inner());
    Ok(BigRational::new(BigInt::from(1), BigInt::from(2) * c))
}

pub fn limit_m_infinite(n2: u64, d: u64) -> Result<f64> {
    Ok(rational_to_f64(&limit_m_infinite_exact(n2, d)?))
}

/// `q^N2 / 2`: the error of guessing from a symmetric-subspace test on
/// `rho^{⊗N2}` against `rho2^{⊗N2}` (state comparison).
pub fn comparison_error(q: OverlapQ, n2: u64) -> f64 {
    if n2 == 0 {
        0.5
    } else {
        0.5 * q.value().powi(n2 as i32)
    }
}

/// Haar average of [`comparison_error`]:
/// `(d-1)/2 * N2! (d-2)! / (N2 + d - 1)!`.
pub fn comparison_average_exact(n2: u64, d: u64) -> Result<BigRational> {
    check_range("d", d as i64, 2, i64::MAX)?;
    let num = BigInt::from(d - 1) * BigInt::from(factorial(n2)) * BigInt::from(factorial(d - 2));
    let den = BigInt::from(2) * BigInt::from(factorial(n2 + d - 1));
    Ok(BigRational::new(num, den))
}

pub fn comparison_average(n2: u64, d: u64) -> Result<f64> {
    Ok(rational_to_f64(&comparison_average_exact(n2, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{avg_error_min, avg_error_min_equal_d2};
    use crate::combinatorics::ProblemSize;

    #[test]
    fn closed_form_limit() {
        assert!((limit_n1_infinite(1, 2).unwrap() - 1.0 / 6.0).abs() < 1e-13);
        assert!(limit_n1_infinite(0, 2).is_err());
        assert_eq!(discrimination_average(0, 3).unwrap(), 0.5);
        // d = 3, M = 1: 1/2 (1 - 2 * int sqrt(1-x)(1-x)) = 1/2 (1 - 4/5)
        assert!((limit_n1_infinite(1, 3).unwrap() - 0.1).abs() < 1e-13);
    }

    #[test]
    fn two_integrals_agree() {
        for m in 1..=50 {
            for d in 2..=5 {
                let a = limit_n1_infinite(m, d).unwrap();
                let b = discrimination_average(m, d).unwrap();
                assert!((a - b).abs() < 1e-12, "M={m} d={d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn finite_sizes_approach_limits() {
        let s = ProblemSize::new(1, 200, 200, 2).unwrap();
        let v = avg_error_min_equal_d2(&s).unwrap().value;
        assert!((v - 1.0 / 6.0).abs() < 0.01, "{v}");
        let v = avg_error_min(&ProblemSize::new(100, 1, 1, 2).unwrap()).value;
        assert!((v - 0.25).abs() < 3e-3 && (v - 0.252_463).abs() < 1e-6, "{v}");
    }

    #[test]
    fn m_limit_is_independent_of_n1() {
        let target = limit_m_infinite(2, 2).unwrap();
        for n1 in [1, 2] {
            let v = avg_error_min(&ProblemSize::new(500, n1, 2, 2).unwrap()).value;
            assert!((v - target).abs() < 0.02 * target, "N1={n1}: {v}");
        }
        // with three copies in the first system the roles swap
        let s = ProblemSize::new(500, 3, 2, 2).unwrap();
        assert!(s.relabeled());
        let v = avg_error_min(&s).value;
        let target = limit_m_infinite(s.n2(), 2).unwrap();
        assert!((v - target).abs() < 0.02 * target, "{v} vs {target}");
    }

    #[test]
    fn comparison_matches_m_limit_exactly() {
        for n2 in 0..=10 {
            for d in 2..=4 {
                assert_eq!(comparison_average_exact(n2, d).unwrap(), limit_m_infinite_exact(n2, d).unwrap());
            }
        }
        assert_eq!(limit_m_infinite(1, 2).unwrap(), 0.25);
        assert_eq!(limit_m_infinite(0, 3).unwrap(), 0.5);
        assert_eq!(comparison_error(OverlapQ::ZERO, 3), 0.0);
        assert_eq!(comparison_error(OverlapQ::ONE, 3), 0.5);
    }

    #[test]
    fn comparison_average_is_haar_mean() {
        for (n2, d) in [(1u64, 2u64), (3, 2), (2, 3), (4, 5)] {
            let f = |q: f64| comparison_error(OverlapQ::new(q).unwrap(), n2) * (d - 1) as f64 * (1.0 - q).powi(d as i32 - 2);
            let quad = integrate(f, 0.0, 1.0, 1e-14).unwrap();
            assert!((quad.value - comparison_average(n2, d).unwrap()).abs() < 1e-14);
        }
    }
}
