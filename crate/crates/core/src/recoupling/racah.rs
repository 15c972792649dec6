//! General Racah single-sum evaluators.
//!
//! The alternating sums cancel heavily, so they are accumulated as exact
//! rationals and rounded once at the end. Cost grows with the spins; these
//! are reference evaluators, not the fast path.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{triad, HalfInt, SixJArgs};
use crate::combinatorics::{factorial, rational_to_f64};

fn fact_q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n as u64)))
}

/// `(a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!` for twice-values.
fn delta_sq(a: i64, b: i64, c: i64) -> BigRational {
    let num = factorial(((a + b - c) / 2) as u64)
        * factorial(((a - b + c) / 2) as u64)
        * factorial(((-a + b + c) / 2) as u64);
    let den = factorial(((a + b + c) / 2 + 1) as u64);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `sign(s) * sqrt(s^2 * radicand)` rounded once at the end.
fn signed_sqrt(sum: &BigRational, radicand: &BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let sq = sum * sum * radicand;
    let mag = rational_to_f64(&sq).sqrt();
    if sum.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Wigner 6j symbol `{a b c; d e f}` (Condon–Shortley convention).
///
/// Returns exactly zero when any triad is inadmissible.
pub fn wigner6j_racah(args: &SixJArgs) -> f64 {
    if !args.is_admissible() {
        return 0.0;
    }
    let [a, b, c, d, e, f] = args.twice();
    let betas = [(a + b + c) / 2, (a + e + f) / 2, (d + b + f) / 2, (d + e + c) / 2];
    let alphas = [(a + b + d + e) / 2, (a + c + d + f) / 2, (b + c + e + f) / 2];
    let t_lo = *betas.iter().max().unwrap();
    let t_hi = *alphas.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_lo..=t_hi {
        let mut den = BigUint::one();
        for beta in betas {
            den *= factorial((t - beta) as u64);
        }
        for alpha in alphas {
            den *= factorial((alpha - t) as u64);
        }
        let term = BigRational::new(BigInt::from(factorial((t + 1) as u64)), BigInt::from(den));
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let radicand = delta_sq(a, b, c) * delta_sq(a, e, f) * delta_sq(d, b, f) * delta_sq(d, e, c);
    signed_sqrt(&sum, &radicand)
}

/// Clebsch–Gordan coefficient `<j1 m1; j2 m2 | J M>` (Condon–Shortley
/// convention). Zero whenever a selection rule fails.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    let (j1, m1, j2, m2, j, m) = (j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice());
    if m != m1 + m2 || !triad(j1, j2, j) {
        return 0.0;
    }
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if mm.abs() > jj || (jj + mm) % 2 != 0 {
            return 0.0;
        }
    }
    let h = |x: i64| x / 2;
    // all of these are integers once the selection rules hold
    let a = h(j1 + j2 - j);
    let b = h(j1 - m1);
    let c = h(j2 + m2);
    let dd = h(j - j2 + m1);
    let e = h(j - j1 - m2);
    let k_lo = 0.max(-dd).max(-e);
    let k_hi = a.min(b).min(c);
    let radicand = BigRational::from_integer(BigInt::from(j + 1))
        * fact_q(a)
        * fact_q(h(j1 - j2 + j))
        * fact_q(h(-j1 + j2 + j))
        / fact_q(h(j1 + j2 + j) + 1)
        * fact_q(h(j1 + m1))
        * fact_q(b)
        * fact_q(c)
        * fact_q(h(j2 - m2))
        * fact_q(h(j + m))
        * fact_q(h(j - m));
    let mut sum = BigRational::zero();
    for k in k_lo..=k_hi {
        let den = factorial(k as u64)
            * factorial((a - k) as u64)
            * factorial((b - k) as u64)
            * factorial((c - k) as u64)
            * factorial((dd + k) as u64)
            * factorial((e + k) as u64);
        let term = BigRational::new(BigInt::one(), BigInt::from(den));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    signed_sqrt(&sum, &radicand)
}
