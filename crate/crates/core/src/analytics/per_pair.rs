//! Error of the optimal measurement for a fixed pair of candidate states.

use super::{ErrorReport, FormulaPath, KTerm, OverlapQ};
use crate::combinatorics::{a1, a2, dim_block, ln_dim_symmetric, ln_factorial_ratio, ratio_to_f64, ProblemSize, EXACT_COUNT_LIMIT};
use crate::error::{check_range, Result};
use crate::quadrature::integrate;
use crate::recoupling::{cos_phi_sq, sin_phi_sq};

/// `ln` of the `l`-th coefficient of `P_k`, so that
/// `P_k = sum_l exp(coef) q^l (1-q)^(N1-l)`.
fn p_coef_ln(size: &ProblemSize, k: u64, l: u64) -> f64 {
    let (m, n1, n2, n) = (size.m(), size.n1(), size.n2(), size.total());
    ((n - 2 * k + 1) as f64).ln()
        + ln_factorial_ratio(
            &[n1, m + n2, n1 - k, m + n2 - k + l],
            &[n - k + 1, k, l, n1 - k - l, l, m + n2 - k],
        )
}

/// `ln` of the `l`-th coefficient of `Q_k`, with weights `q^l (1-q)^(N2-l)`.
fn q_coef_ln(size: &ProblemSize, k: u64, l: u64) -> f64 {
    let (m, n1, n2, n) = (size.m(), size.n1(), size.n2(), size.total());
    ((n - 2 * k + 1) as f64).ln()
        + ln_factorial_ratio(
            &[m + n1, n2, m + n1 - k + l, n2 - k],
            &[n - k + 1, k, l, m + n1 - k, l, n2 - k - l],
        )
}

/// `ln(q^l (1-q)^(n-l))` with `0^0 = 1`.
fn ln_weight(ln_q: f64, ln_p: f64, l: u64, n: u64) -> f64 {
    let a = if l == 0 { 0.0 } else { l as f64 * ln_q };
    let b = if n == l { 0.0 } else { (n - l) as f64 * ln_p };
    a + b
}

fn poly(coefs: &[f64], q: f64, n: u64) -> f64 {
    let (ln_q, ln_p) = (q.ln(), (1.0 - q).ln());
    coefs.iter().enumerate().map(|(l, c)| (c + ln_weight(ln_q, ln_p, l as u64, n)).exp()).sum()
}

/// Weight of `rho1^{⊗N1} ⊗ rho^{⊗(M+N2)}` on the `[N-k, k]` block.
pub fn p_k(size: &ProblemSize, k: u64, q: OverlapQ) -> Result<f64> {
    check_range("k", k as i64, 0, size.n1() as i64)?;
    let coefs: Vec<f64> = (0..=size.n1() - k).map(|l| p_coef_ln(size, k, l)).collect();
    Ok(poly(&coefs, q.value(), size.n1()))
}

/// Weight of `rho^{⊗(M+N1)} ⊗ rho2^{⊗N2}` on the `[N-k, k]` block.
pub fn q_k(size: &ProblemSize, k: u64, q: OverlapQ) -> Result<f64> {
    check_range("k", k as i64, 0, size.k_max() as i64)?;
    let coefs: Vec<f64> = (0..=size.n2() - k).map(|l| q_coef_ln(size, k, l)).collect();
    Ok(poly(&coefs, q.value(), size.n2()))
}

/// The `q`-independent part of the per-pair error, tabulated once per size.
#[derive(Clone, Debug)]
pub struct PerPairCoefficients {
    size: ProblemSize,
    rho: f64,
    p: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    cos_sq: Vec<f64>,
    sin_sq: Vec<f64>,
}

impl PerPairCoefficients {
    pub fn new(size: &ProblemSize) -> Self {
        let (n1, n2) = (size.n1(), size.n2());
        let rho = if size.total() <= EXACT_COUNT_LIMIT {
            ratio_to_f64(a1(size).as_biguint(), a2(size).as_biguint())
        } else if n1 == n2 || size.m() == 0 {
            1.0
        } else {
            let (m, d) = (size.m(), size.d());
            (ln_dim_symmetric(n1, d) + ln_dim_symmetric(m + n2, d) - ln_dim_symmetric(m + n1, d) - ln_dim_symmetric(n2, d))
                .exp()
        };
        PerPairCoefficients {
            size: *size,
            rho,
            p: (0..=n1).map(|k| (0..=n1 - k).map(|l| p_coef_ln(size, k, l)).collect()).collect(),
            q: (0..=n1).map(|k| (0..=n2 - k).map(|l| q_coef_ln(size, k, l)).collect()).collect(),
            cos_sq: (0..=n1).map(|k| cos_phi_sq(size, k).expect("k <= N1")).collect(),
            sin_sq: (0..=n1).map(|k| sin_phi_sq(size, k).expect("k <= N1")).collect(),
        }
    }

    pub fn size(&self) -> &ProblemSize {
        &self.size
    }

    /// `(P_k, Q_k, term_k)` for `k <= N1`.
    fn block(&self, k: usize, q: f64) -> (f64, f64, f64) {
        let pk = poly(&self.p[k], q, self.size.n1());
        let qk = poly(&self.q[k], q, self.size.n2());
        let (s2, c2, rho) = (self.sin_sq[k], self.cos_sq[k], self.rho);
        // Normalized by A2. |<u|w>|^2 and 1 - |<v|w>|^2 are written with the
        // difference of square roots rationalized where it would cancel.
        let gap = 1.0 - rho;
        let r = (gap * gap + 4.0 * rho * s2).sqrt();
        if k == 0 || r == 0.0 {
            return (pk, qk, 0.5 * qk);
        }
        let x = gap + 2.0 * rho * s2;
        let uw = 2.0 * rho * rho * s2 * c2 / (r * (r + x));
        let y = 2.0 * s2 - gap;
        let not_vw = if y >= 0.0 { 2.0 * s2 * c2 / (r * (r + y)) } else { 0.5 * (r - y) / r };
        (pk, qk, 0.5 * (pk * uw + qk * not_vw))
    }

    pub fn error(&self, q: OverlapQ) -> f64 {
        (0..self.p.len()).map(|k| self.block(k, q.value()).2).sum()
    }

    pub fn report(&self, q: OverlapQ) -> ErrorReport {
        let mut per_k: Vec<KTerm> = (0..self.p.len())
            .map(|k| {
                let (pk, qk, term) = self.block(k, q.value());
                KTerm {
                    k: k as u64,
                    dim: dim_block(&self.size, k as u64),
                    cos_phi: self.cos_sq[k].sqrt(),
                    term,
                    p_k: Some(pk),
                    q_k: Some(qk),
                }
            })
            .collect();
        // blocks beyond N1 carry no weight from the first hypothesis and are
        // fully rejected under the second
        for k in self.size.n1() + 1..=self.size.k_max() {
            per_k.push(KTerm {
                k,
                dim: dim_block(&self.size, k),
                cos_phi: 0.0,
                term: 0.0,
                p_k: None,
                q_k: Some(q_k(&self.size, k, q).expect("k <= k_max")),
            });
        }
        let value = per_k.iter().map(|t| t.term).sum();
        ErrorReport { value, per_k, formula_path: FormulaPath::PerPair, relabeled: self.size.relabeled(), size: self.size }
    }
}

/// Error probability of the optimal averaged measurement on the pair
/// `(rho1, rho2)` with `Tr[rho1 rho2] = q`.
pub fn error_given_overlap(size: &ProblemSize, q: OverlapQ) -> ErrorReport {
    PerPairCoefficients::new(size).report(q)
}

/// Integral of the per-pair error against the density `(d-1)(1-q)^(d-2)` of
/// `q` under Haar-random pairs, next to the averaged closed form.
pub fn haar_average_check(size: &ProblemSize) -> Result<(f64, f64)> {
    let table = PerPairCoefficients::new(size);
    let d = size.d();
    let density = move |q: f64| (d - 1) as f64 * (1.0 - q).powi(d as i32 - 2);
    let quad = integrate(|q| table.error(OverlapQ(q)) * density(q), 0.0, 1.0, 1e-13)?;
    Ok((quad.value, super::avg_error_min(size).value))
}
