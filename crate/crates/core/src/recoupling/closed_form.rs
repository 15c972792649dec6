//! Closed forms for stretched 6j symbols and the changepoint overlaps.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{HalfInt, SixJArgs};
use crate::combinatorics::{binomial, factorial_ratio, ProblemSize};
use crate::error::{check_range, Result};

fn check_k(size: &ProblemSize, k: u64) -> Result<()> {
    check_range("k", k as i64, 0, size.k_max() as i64)
}

/// Stretched 6j symbol, defined when the largest triad sum `B4` equals the
/// smallest four-sum `A1`. The Racah sum then has the single term `t = B4`.
/// Returns `None` outside that case.
pub fn wigner6j_stretched(args: &SixJArgs) -> Option<f64> {
    if !args.is_admissible() {
        return None;
    }
    let [a, b, c, d, e, f] = args.twice();
    let mut al = [(a + b + d + e) / 2, (a + c + d + f) / 2, (b + c + e + f) / 2];
    let mut be = [(a + b + c) / 2, (a + e + f) / 2, (b + d + f) / 2, (c + d + e) / 2];
    al.sort_unstable();
    be.sort_unstable();
    if be[3] != al[0] {
        return None;
    }
    let top = be[3] as u64;
    let mut num = vec![top + 1, top + 1];
    let mut den = Vec::with_capacity(14);
    for x in [top - be[0] as u64, top - be[1] as u64, top - be[2] as u64, (al[1] - al[0]) as u64, (al[2] - al[0]) as u64] {
        den.extend([x, x]);
    }
    for (x, y, z) in [(a, b, c), (a, e, f), (d, b, f), (d, e, c)] {
        num.extend([(x + y - z) / 2, (x - y + z) / 2, (-x + y + z) / 2].map(|v| v as u64));
        den.push(((x + y + z) / 2 + 1) as u64);
    }
    let sign = if top % 2 == 0 { 1.0 } else { -1.0 };
    Some(sign * factorial_ratio(&num, &den).sqrt())
}

/// Factors `(t_i, u_i)` with `cos^2 phi_k = prod t_i` and `u_i = 1 - t_i`,
/// each side formed from exact integer products.
fn overlap_factors(m: u64, n1: u64, n2: u64, k: u64) -> impl Iterator<Item = (f64, f64)> {
    let (mf, n1f, n2f, kf) = (m as f64, n1 as f64, n2 as f64, k as f64);
    let lower = k <= m;
    let count = if lower { k } else { m };
    (1..=count).map(move |i| {
        let i = i as f64;
        let kept = (n1f - kf + i) * (n2f - kf + i);
        if lower {
            let den = (mf + n1f - kf + i) * (mf + n2f - kf + i);
            (kept / den, mf * (mf + n1f + n2f - 2.0 * kf + 2.0 * i) / den)
        } else {
            let den = (n1f + i) * (n2f + i);
            (kept / den, kf * (n1f + n2f + 2.0 * i - kf) / den)
        }
    })
}

/// `ln cos^2 phi_k`; `-inf` for `k > N1`. No range check.
pub(crate) fn ln_cos_phi_sq(size: &ProblemSize, k: u64) -> f64 {
    if k > size.n1() {
        return f64::NEG_INFINITY;
    }
    overlap_factors(size.m(), size.n1(), size.n2(), k)
        .map(|(t, u)| if u < 0.5 { (-u).ln_1p() } else { t.ln() })
        .sum()
}

/// `cos^2 phi_k = C(N1,k) C(N2,k) / (C(M+N1,k) C(M+N2,k))` as an exact rational.
pub fn cos_phi_sq_exact(size: &ProblemSize, k: u64) -> Result<BigRational> {
    check_k(size, k)?;
    let k = k as i64;
    let num = binomial(size.n1(), k) * binomial(size.n2(), k);
    let den = binomial(size.m() + size.n1(), k) * binomial(size.m() + size.n2(), k);
    Ok(BigRational::new(BigInt::from(num.into_inner()), BigInt::from(den.into_inner())))
}

/// Squared overlap between the two multiplicity vectors of block `k`.
/// Zero for `k > N1`.
pub fn cos_phi_sq(size: &ProblemSize, k: u64) -> Result<f64> {
    check_k(size, k)?;
    if k > size.n1() {
        return Ok(0.0);
    }
    Ok(overlap_factors(size.m(), size.n1(), size.n2(), k).map(|(t, _)| t).product())
}

/// `1 - cos^2 phi_k`, computed without cancellation.
pub fn sin_phi_sq(size: &ProblemSize, k: u64) -> Result<f64> {
    check_k(size, k)?;
    Ok(-ln_cos_phi_sq(size, k).exp_m1())
}

pub fn cos_phi(size: &ProblemSize, k: u64) -> Result<f64> {
    Ok(cos_phi_sq(size, k)?.sqrt())
}

/// The changepoint 6j symbol `{N1/2 M/2 (M+N1)/2; N2/2 N/2-k (M+N2)/2}` from
/// its product form. Zero for `N1 < k <= min(M+N1, N2)`.
pub fn wigner6j_special(size: &ProblemSize, k: u64) -> Result<f64> {
    check_k(size, k)?;
    if k > size.n1() {
        return Ok(0.0);
    }
    let (m, n1, n2) = (size.m() as f64, size.n1() as f64, size.n2() as f64);
    let sign = if (size.total() - k) % 2 == 0 { 1.0 } else { -1.0 };
    let ratio = cos_phi_sq(size, k)?;
    Ok(sign * (ratio / ((m + n1 + 1.0) * (m + n2 + 1.0))).sqrt())
}

/// `cos phi_k` recovered from a general 6j evaluation, signed so that it is
/// non-negative whenever the two agree.
pub fn overlap_from_6j(size: &ProblemSize, k: u64) -> Result<f64> {
    check_k(size, k)?;
    let (m, n1, n2) = (size.m() as f64, size.n1() as f64, size.n2() as f64);
    let sign = if (size.total() - k) % 2 == 0 { 1.0 } else { -1.0 };
    let six = super::wigner6j_racah(&SixJArgs::changepoint(size, k));
    Ok(sign * ((m + n1 + 1.0) * (m + n2 + 1.0)).sqrt() * six)
}

/// Squared coupling coefficient
/// `<N/2-k, N/2-N1+l | N1/2, -N1/2+l ; (M+N2)/2, (M+N2)/2>^2`
/// for `0 <= k <= N1` and `0 <= l <= N1 - k`.
pub fn cg_edge_squared(size: &ProblemSize, k: u64, l: u64) -> Result<f64> {
    let (m, n1, n2) = (size.m(), size.n1(), size.n2());
    check_range("k", k as i64, 0, n1 as i64)?;
    check_range("l", l as i64, 0, (n1 - k) as i64)?;
    let n = size.total();
    let ratio = factorial_ratio(
        &[n1 - k, n1 - l, m + n2, m + n2 - k + l],
        &[n - k + 1, n1 - k - l, m + n2 - k, k, l],
    );
    Ok((n - 2 * k + 1) as f64 * ratio)
}

/// Arguments of the coupling coefficient squared by [`cg_edge_squared`].
pub fn cg_edge_args(size: &ProblemSize, k: u64, l: u64) -> [HalfInt; 6] {
    let (m, n1, n2) = (size.m() as i64, size.n1() as i64, size.n2() as i64);
    let (k, l) = (k as i64, l as i64);
    let n = m + n1 + n2;
    let h = HalfInt::from_twice;
    [h(n1), h(-n1 + 2 * l), h(m + n2), h(m + n2), h(n - 2 * k), h(n - 2 * n1 + 2 * l)]
}
