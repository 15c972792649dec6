//! Exponential decay rate of the per-pair error when `N1 = N2 = αM`.

use serde::Serialize;

use crate::analytics::OverlapQ;
use crate::combinatorics::{ln_binomial, ln_factorial_ratio, ProblemSize};
use crate::error::{Error, Result};
use crate::recoupling::closed_form::ln_cos_phi_sq;
use crate::recoupling::sin_phi_sq;

/// Closed-form rate at `(alpha, q)` with its large-`alpha` approximation and
/// the Chernoff value `-ln q`. All in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateResult {
    pub alpha: f64,
    pub q: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub h_min: f64,
    pub approx: f64,
    pub chernoff: f64,
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} must be positive and finite")))
    }
}

fn check_rate_q(q: OverlapQ) -> Result<f64> {
    let q = q.value();
    if q == 0.0 {
        return Err(Error::Domain("the rate is unbounded at q = 0".into()));
    }
    Ok(q)
}

/// The rate function `h(β, γ)` on `0 <= β <= α`, `0 <= γ <= α - β`.
pub fn rate_h(alpha: f64, q: OverlapQ, beta: f64, gamma: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let qv = check_rate_q(q)?;
    // points on the edge gamma = alpha - beta may carry rounding error
    let slack = 1e-12 * alpha;
    if !(0.0..=alpha).contains(&beta) || !(0.0..=alpha - beta + slack).contains(&gamma) {
        return Err(Error::Domain(format!("(beta, gamma) = ({beta}, {gamma}) outside the domain for alpha = {alpha}")));
    }
    let (a, b, g) = (alpha, beta, gamma);
    let rest = (a - b - g).max(0.0);
    let tail = if a - g == 0.0 {
        0.0
    } else if qv == 1.0 {
        return Ok(f64::INFINITY);
    } else {
        -(a - g) * (-qv).ln_1p()
    };
    Ok(xlnx(rest) - xlnx(1.0 + a - b + g) + xlnx(a - b) - xlnx(1.0 + a - b) - 3.0 * xlnx(a)
        + xlnx(1.0 + a)
        + xlnx(b)
        + xlnx(1.0 + 2.0 * a - b)
        + 2.0 * xlnx(g)
        - g * qv.ln()
        + tail)
}

/// Closed-form minimizer `(β1, γ1)` of [`rate_h`].
pub fn rate_minimizer(alpha: f64, q: OverlapQ) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let qv = check_rate_q(q)?;
    if qv == 1.0 {
        return Ok((0.0, alpha));
    }
    // γ1 is the positive root of γ^2 - q(α-1)γ - qα = 0
    let b = qv * (alpha - 1.0);
    let disc = (b * b + 4.0 * qv * alpha).sqrt();
    let gamma1 = if b >= 0.0 { 0.5 * (b + disc) } else { 2.0 * qv * alpha / (disc - b) };
    // β1 is the smaller root of β^2 - (2α+1)β + α(α-γ1) = 0
    let c = alpha * (alpha - gamma1);
    let s = 2.0 * alpha + 1.0;
    let beta1 = 2.0 * c / (s + (s * s - 4.0 * c).sqrt());
    Ok((beta1, gamma1))
}

/// Rate at the closed-form minimizer, with its approximations.
pub fn rate(alpha: f64, q: OverlapQ) -> Result<RateResult> {
    let (beta1, gamma1) = rate_minimizer(alpha, q)?;
    let qv = q.value();
    if qv == 1.0 {
        return Ok(RateResult { alpha, q: qv, beta1, gamma1, h_min: 0.0, approx: 0.0, chernoff: 0.0 });
    }
    let h_min = rate_h(alpha, q, beta1, gamma1)?;
    let chernoff = -qv.ln();
    let approx = chernoff - (1.0 - qv) / (qv * (alpha - 1.0) + 2.0);
    Ok(RateResult { alpha, q: qv, beta1, gamma1, h_min, approx, chernoff })
}

/// One summand `ln(C_k D_{k,l})` of the per-pair error at `N1 = N2 = n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CkDkl {
    pub k: u64,
    pub l: u64,
    pub value: f64,
}

fn ln_ck(m: u64, n: u64, k: u64, size: &ProblemSize) -> f64 {
    let top = m + 2 * n;
    // 1 - sqrt(1 - r^2) = r^2 / (1 + sqrt(1 - r^2)) with r = cos phi_k
    let s = sin_phi_sq(size, k).expect("k <= n").sqrt();
    ((top - 2 * k + 1) as f64).ln() + ln_factorial_ratio(&[n, m + n], &[top - k + 1, k]) - std::f64::consts::LN_2
        + ln_cos_phi_sq(size, k)
        - s.ln_1p()
}

/// All summands of the per-pair error `sum_k sum_l C_k D_{k,l}` for
/// `M` and `N1 = N2 = n`, in log space.
pub fn ck_dkl(m: u64, n: u64, q: OverlapQ) -> Result<Vec<CkDkl>> {
    let size = ProblemSize::new(m, n, n, 2)?;
    let qv = q.value();
    let (ln_q, ln_p) = (qv.ln(), (-qv).ln_1p());
    let mut out = Vec::with_capacity(((n + 1) * (n + 2) / 2) as usize);
    for k in 0..=n {
        let ck = ln_ck(m, n, k, &size);
        for l in 0..=n - k {
            let wq = if l == 0 { 0.0 } else { l as f64 * ln_q };
            let wp = if n == l { 0.0 } else { (n - l) as f64 * ln_p };
            let d = ln_binomial(n - k, l as i64) + ln_binomial(m + n - k + l, l as i64) + wq + wp;
            out.push(CkDkl { k, l, value: ck + d });
        }
    }
    Ok(out)
}

/// `-(1/M) ln p` for the per-pair error at `N1 = N2 = αM`, by log-sum-exp
/// over the `C_k D_{k,l}` summands.
pub fn finite_size_rate(m: u64, alpha: f64, q: OverlapQ) -> Result<f64> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::OutOfRange { name: "M", value: 0, lo: 1, hi: i64::MAX });
    }
    let n_real = alpha * m as f64;
    let n = n_real.round();
    if (n_real - n).abs() > 1e-9 * n.max(1.0) || n < 1.0 {
        return Err(Error::Domain(format!("alpha * M = {n_real} must be a positive integer")));
    }
    let terms = ck_dkl(m, n as u64, q)?;
    let max = terms.iter().map(|t| t.value).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t.value - max).exp()).sum();
    Ok(-(max + sum.ln()) / m as f64)
}
