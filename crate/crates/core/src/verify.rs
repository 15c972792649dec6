//! The numbered acceptance checks, shared by the test suite and the `verify`
//! command.
//!
//! Each check returns an [`Outcome`] rather than panicking, so a failing
//! criterion is reported alongside the others.

use std::fmt;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{
    avg_error_min, avg_error_min_d2, avg_error_min_equal, avg_error_min_equal_d2, error_given_overlap,
    haar_average_check, neg_eigenvalue, p_k, q_k, OverlapQ,
};
use crate::asymptotics::{
    comparison_average_exact, finite_size_rate, limit_m_infinite_exact, limit_n1_infinite, rate, rate_h, rate_minimizer,
    Figure,
};
use crate::combinatorics::{a1, a2, dim_block, ProblemSize};
use crate::dense::{difference_spectrum, error_of_povm, haar_random_pure, mc_average_error};
use crate::error::Result;
use crate::recoupling::{
    cg_edge_args, cg_edge_squared, clebsch_gordan, wigner6j_racah, wigner6j_special, wigner6j_stretched, SixJArgs,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} criterion {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

pub const NAMES: [&str; 11] = [
    "helstrom-equivalence",
    "povm-equivalence",
    "monte-carlo-average",
    "specialization-coherence",
    "haar-bridge",
    "recoupling",
    "normalization",
    "limits",
    "rate-function",
    "finite-size-rate",
    "figure-data",
];

fn outcome(id: u8, passed: bool, detail: String) -> Outcome {
    Outcome { id, name: NAMES[id as usize - 1], passed, detail }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Analytic,
    Oracle,
    Recoupling,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            Suite::Analytic => &[4, 5, 7, 8, 9, 10, 11],
            Suite::Oracle => &[1, 2, 3],
            Suite::Recoupling => &[6],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    /// Monte Carlo pairs for criterion 3.
    pub samples: usize,
    /// Random pairs per size for criterion 2.
    pub pairs: usize,
    /// Largest `d^N` in the oracle grid.
    pub max_dim: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 1, samples: 10_000, pairs: 20, max_dim: 1024 }
    }
}

pub const ORACLE_TOL: f64 = 1e-8;

/// Every canonical size with `d ∈ {2, 3}` and `d^N <= max_dim`.
pub fn oracle_grid(max_dim: usize) -> Vec<ProblemSize> {
    let mut out = Vec::new();
    for d in [2u64, 3] {
        let mut n = 1u64;
        while (d as usize).pow(n as u32) <= max_dim {
            for m in 0..=n {
                for n1 in 0..=(n - m) / 2 {
                    out.push(ProblemSize::new(m, n1, n - m - n1, d).expect("valid"));
                }
            }
            n += 1;
        }
    }
    out
}

/// Dense results for one size: one eigendecomposition serves the Helstrom
/// error, the optimal measurement and the spectrum comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRecord {
    pub size: ProblemSize,
    pub analytic: f64,
    pub helstrom: f64,
    /// Largest `|error_of_povm - error_given_overlap|` over the random pairs.
    pub povm_worst: f64,
    /// Largest distance between the negative spectrum and its predicted
    /// multiset, infinite on a multiplicity mismatch.
    pub spectrum_worst: f64,
}

/// Predicted negative eigenvalues of the difference operator, ascending.
pub fn predicted_negative_spectrum(size: &ProblemSize) -> Vec<f64> {
    let (c1, c2) = (a1(size).to_f64(), a2(size).to_f64());
    let mut out = Vec::new();
    for k in 0..=size.k_max() {
        let value = if k <= size.n1() {
            neg_eigenvalue(c1, c2, crate::recoupling::cos_phi_sq(size, k).expect("k in range"))
        } else {
            -1.0 / c2
        };
        if value < -crate::dense::ZERO_THRESHOLD {
            let mult = dim_block(size, k).to_u64().expect("small block");
            out.extend(std::iter::repeat_n(value, mult as usize));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn oracle_record(size: &ProblemSize, pairs: usize, seed: u64, stream: u64) -> Result<OracleRecord> {
    let spectrum = difference_spectrum(size)?;
    let povm = spectrum.optimal_povm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let d = size.d() as usize;
    let mut povm_worst = 0.0f64;
    for _ in 0..pairs {
        let r1 = haar_random_pure(d, &mut rng);
        let r2 = haar_random_pure(d, &mut rng);
        let q = OverlapQ::new(r1.overlap(&r2).clamp(0.0, 1.0))?;
        let dense = error_of_povm(&r1, &r2, size, &povm)?;
        povm_worst = povm_worst.max((dense - error_given_overlap(size, q).value).abs());
    }
    let found = spectrum.negative_eigenvalues();
    let predicted = predicted_negative_spectrum(size);
    let spectrum_worst = if found.len() == predicted.len() {
        found.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(OracleRecord { size: *size, analytic: avg_error_min(size).value, helstrom: spectrum.helstrom_error(), povm_worst, spectrum_worst })
}

/// [`oracle_record`] over a grid; size `i` draws its pairs from stream `i`.
pub fn oracle_sweep(grid: &[ProblemSize], pairs: usize, seed: u64) -> Result<Vec<OracleRecord>> {
    grid.par_iter().enumerate().map(|(i, s)| oracle_record(s, pairs, seed, i as u64)).collect()
}

fn worst_of<'a>(records: &'a [OracleRecord], f: impl Fn(&OracleRecord) -> f64) -> Option<(&'a OracleRecord, f64)> {
    records.iter().map(|r| (r, f(r))).max_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn helstrom_equivalence(records: &[OracleRecord]) -> Outcome {
    match worst_of(records, |r| (r.helstrom - r.analytic).abs()) {
        Some((r, w)) => outcome(
            1,
            w <= ORACLE_TOL,
            format!("{} sizes, worst {w:.2e} at {} (tol {ORACLE_TOL:.0e})", records.len(), r.size),
        ),
        None => outcome(1, false, "empty grid".into()),
    }
}

pub fn povm_equivalence(records: &[OracleRecord]) -> Outcome {
    let unequal = records.iter().filter(|r| r.size.n1() != r.size.n2()).count();
    match worst_of(records, |r| r.povm_worst) {
        Some((r, w)) => outcome(
            2,
            w <= ORACLE_TOL,
            format!("{} sizes ({unequal} with N1 != N2), worst {w:.2e} at {} (tol {ORACLE_TOL:.0e})", records.len(), r.size),
        ),
        None => outcome(2, false, "empty grid".into()),
    }
}

pub fn monte_carlo_average(samples: usize, seed: u64) -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in [ProblemSize::new(1, 1, 1, 2)?, ProblemSize::new(1, 1, 2, 2)?] {
        let target = avg_error_min(&s).value;
        let mc = mc_average_error(&s, None, samples, seed)?;
        let z = (mc.mean - target).abs() / mc.standard_error;
        passed &= z <= 3.0;
        parts.push(format!("{s}: {:.5} ± {:.5} vs {target:.5} ({z:.2}σ)", mc.mean, mc.standard_error));
    }
    Ok(outcome(3, passed, format!("{samples} pairs, seed {seed}; {}", parts.join("; "))))
}

pub fn specialization_coherence() -> Result<Outcome> {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for d in 2..=4 {
        for m in 0..=10 {
            for n1 in 0..=10 {
                for n2 in n1..=10 {
                    let Ok(s) = ProblemSize::new(m, n1, n2, d) else { continue };
                    let general = avg_error_min(&s).value;
                    for special in [avg_error_min_d2(&s), avg_error_min_equal(&s), avg_error_min_equal_d2(&s)] {
                        if let Ok(r) = special {
                            worst = worst.max((r.value - general).abs());
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(outcome(4, worst <= TOL, format!("{checked} comparisons, worst {worst:.2e} (tol {TOL:.0e})")))
}

pub fn haar_bridge(grid: &[ProblemSize]) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for s in grid {
        let (integral, closed) = haar_average_check(s)?;
        worst = worst.max((integral - closed).abs());
    }
    Ok(outcome(5, worst <= ORACLE_TOL, format!("{} sizes, worst {worst:.2e} (tol {ORACLE_TOL:.0e})", grid.len())))
}

pub fn recoupling() -> Outcome {
    const TOL: f64 = 1e-12;
    let (mut worst6j, mut worst_cg, mut n6j, mut ncg) = (0.0f64, 0.0f64, 0, 0);
    for m in 0..=8 {
        for n1 in 0..=8 {
            for n2 in n1..=8 {
                let Ok(s) = ProblemSize::new(m, n1, n2, 2) else { continue };
                for k in 0..=s.k_max() {
                    let args = SixJArgs::changepoint(&s, k);
                    let racah = wigner6j_racah(&args);
                    worst6j = worst6j.max((wigner6j_special(&s, k).expect("k in range") - racah).abs());
                    if let Some(v) = wigner6j_stretched(&args) {
                        worst6j = worst6j.max((v - racah).abs());
                    }
                    n6j += 1;
                }
                for k in 0..=n1 {
                    for l in 0..=n1 - k {
                        let [j1, m1, j2, m2, j, mm] = cg_edge_args(&s, k, l);
                        let general = clebsch_gordan(j1, m1, j2, m2, j, mm);
                        worst_cg = worst_cg.max((cg_edge_squared(&s, k, l).expect("in range") - general * general).abs());
                        ncg += 1;
                    }
                }
            }
        }
    }
    outcome(
        6,
        worst6j <= TOL && worst_cg <= TOL,
        format!("6j: {n6j} symbols, worst {worst6j:.2e}; CG: {ncg} coefficients, worst {worst_cg:.2e} (tol {TOL:.0e})"),
    )
}

pub fn normalization(grid: &[ProblemSize]) -> Result<Outcome> {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for s in grid {
        for qv in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let q = OverlapQ::new(qv)?;
            let sp: f64 = (0..=s.n1()).map(|k| p_k(s, k, q)).sum::<Result<f64>>()?;
            let sq: f64 = (0..=s.k_max()).map(|k| q_k(s, k, q)).sum::<Result<f64>>()?;
            worst = worst.max((sp - 1.0).abs()).max((sq - 1.0).abs());
        }
    }
    Ok(outcome(7, worst <= TOL, format!("{} sizes x 5 overlaps, worst {worst:.2e} (tol {TOL:.0e})", grid.len())))
}

pub fn limits() -> Result<Outcome> {
    let mut failures = Vec::new();
    let l1 = limit_n1_infinite(1, 2)?;
    if (l1 - 1.0 / 6.0).abs() > 1e-8 {
        failures.push(format!("N1 limit at M=1 is {l1}"));
    }
    let big = avg_error_min(&ProblemSize::new(1, 200, 200, 2)?).value;
    if (big - 1.0 / 6.0).abs() >= 0.01 {
        failures.push(format!("N1=N2=200 gives {big}"));
    }
    let quarter = BigRational::new(1.into(), 4.into());
    if limit_m_infinite_exact(1, 2)? != quarter {
        failures.push("M limit at N2=1 is not 1/4".into());
    }
    let m100 = avg_error_min(&ProblemSize::new(100, 1, 1, 2)?).value;
    if (m100 - 0.25).abs() >= 3e-3 {
        failures.push(format!("M=100 gives {m100}"));
    }
    for n2 in 0..=10 {
        for d in 2..=4 {
            if comparison_average_exact(n2, d)? != limit_m_infinite_exact(n2, d)? {
                failures.push(format!("comparison differs at N2={n2}, d={d}"));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("N1 limit {l1:.10}, N1=N2=200 {big:.6}, M limit 1/4, M=100 {m100:.6}, comparison exact for N2<=10, d<=4")
    } else {
        failures.join("; ")
    };
    Ok(outcome(8, failures.is_empty(), detail))
}

/// Bound used for `α² |h_min - approx|` over `α = 5..=100` at `q = 1/2`.
pub const RATE_REMAINDER_BOUND: f64 = 2.0;

pub fn rate_function() -> Result<Outcome> {
    let alphas = [1.0, 2.0, 5.0, 10.0];
    let mut failures = Vec::new();
    let mut worst_grad = 0.0f64;
    let mut worst_grid = f64::NEG_INFINITY;
    for &alpha in &alphas {
        for i in 1..10 {
            let q = OverlapQ::new(i as f64 / 10.0)?;
            let (b, g) = rate_minimizer(alpha, q)?;
            let step = 1e-3 * b.min(g).min(alpha - b - g).min(1.0);
            let h = |db: f64, dg: f64| rate_h(alpha, q, b + db, g + dg);
            let stencil = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
                Ok((f(-2.0 * step)? - 8.0 * f(-step)? + 8.0 * f(step)? - f(2.0 * step)?) / (12.0 * step))
            };
            worst_grad = worst_grad.max(stencil(&|x| h(x, 0.0))?.abs()).max(stencil(&|x| h(0.0, x))?.abs());
            let r = rate(alpha, q)?;
            if !(r.h_min >= 0.0 && r.h_min <= r.chernoff) {
                failures.push(format!("h_min = {} outside [0, {}] at alpha={alpha}, q={}", r.h_min, r.chernoff, q.value()));
            }
            if i % 4 == 1 {
                let n = 400;
                for bi in 0..=n {
                    let bb = alpha * bi as f64 / n as f64;
                    for gi in 0..=n {
                        let gg = (alpha - bb) * gi as f64 / n as f64;
                        worst_grid = worst_grid.max(r.h_min - rate_h(alpha, q, bb, gg)?);
                    }
                }
            }
        }
        if rate(alpha, OverlapQ::ONE)?.h_min != 0.0 {
            failures.push(format!("h_min(q=1) != 0 at alpha={alpha}"));
        }
    }
    if worst_grad > 1e-8 {
        failures.push(format!("gradient {worst_grad:.2e} > 1e-8"));
    }
    if worst_grid > 0.0 {
        failures.push(format!("grid beats the closed form by {worst_grid:.2e}"));
    }
    let half = OverlapQ::new(0.5)?;
    let mut worst_remainder = 0.0f64;
    for a in 5..=100 {
        let r = rate(a as f64, half)?;
        worst_remainder = worst_remainder.max((a * a) as f64 * (r.h_min - r.approx).abs());
    }
    if worst_remainder > RATE_REMAINDER_BOUND {
        failures.push(format!("alpha^2 remainder {worst_remainder:.3} > {RATE_REMAINDER_BOUND}"));
    }
    let detail = if failures.is_empty() {
        format!(
            "gradient {worst_grad:.2e}, grid margin {:.2e}, alpha^2 remainder {worst_remainder:.3} <= {RATE_REMAINDER_BOUND}",
            -worst_grid
        )
    } else {
        failures.join("; ")
    };
    Ok(outcome(9, failures.is_empty(), detail))
}

pub fn finite_size_convergence() -> Result<Outcome> {
    let half = OverlapQ::new(0.5)?;
    let target = rate(1.0, half)?.h_min;
    let mut failures = Vec::new();
    let mut prev = f64::INFINITY;
    let mut gaps = Vec::new();
    for m in [1u64, 5, 10, 20, 40, 60] {
        let gap = finite_size_rate(m, 1.0, half)? - target;
        if !(gap > 0.0 && gap < prev) {
            failures.push(format!("gap {gap:.4} at M={m} does not shrink"));
        }
        gaps.push(format!("{gap:.4}"));
        prev = gap;
    }
    if prev >= 0.05 {
        failures.push(format!("gap {prev:.4} at M=60 is not below 0.05"));
    }
    let mut worst = 0.0f64;
    for m in 1..=30u64 {
        for alpha in [0.5, 1.0, 2.0] {
            let n = alpha * m as f64;
            if n.fract() != 0.0 {
                continue;
            }
            let s = ProblemSize::new(m, n as u64, n as u64, 2)?;
            for qv in [0.1, 0.5, 0.9] {
                let q = OverlapQ::new(qv)?;
                let direct = -error_given_overlap(&s, q).value.ln() / m as f64;
                worst = worst.max((direct - finite_size_rate(m, alpha, q)?).abs());
            }
        }
    }
    if worst > 1e-10 {
        failures.push(format!("log-space rate differs from the direct error by {worst:.2e}"));
    }
    let detail = if failures.is_empty() {
        format!("gaps to h_min at M=1,5,10,20,40,60: {}; log-space vs direct {worst:.2e}", gaps.join(", "))
    } else {
        failures.join("; ")
    };
    Ok(outcome(10, failures.is_empty(), detail))
}

pub fn figure_data() -> Result<Outcome> {
    let mut failures = Vec::new();
    for fig in [Figure::RateVsOverlap, Figure::RateVsAlpha] {
        for r in fig.rows()? {
            if r.h_min > r.chernoff {
                failures.push(format!("h_min > chernoff at alpha={}, q={}", r.alpha, r.q));
            }
        }
    }
    let rows = Figure::RateVsAlpha.rows()?;
    let gaps: Vec<f64> = rows.iter().filter(|r| r.alpha >= 5.0).map(|r| (r.h_min - r.approx).abs()).collect();
    if let Some(w) = gaps.windows(2).find(|w| w[1] > w[0]) {
        failures.push(format!("|h_min - approx| rises from {:.3e} to {:.3e}", w[0], w[1]));
    }
    let detail = if failures.is_empty() {
        format!("200 rows, h_min <= chernoff; |h_min - approx| falls from {:.3e} to {:.3e}", gaps[0], gaps[gaps.len() - 1])
    } else {
        failures.join("; ")
    };
    Ok(outcome(11, failures.is_empty(), detail))
}

/// Runs the requested criteria in order. The oracle grid is swept once and
/// shared by criteria 1 and 2.
pub fn run_suite(suite: Suite, settings: &Settings) -> Result<Vec<Outcome>> {
    let grid = oracle_grid(settings.max_dim);
    let ids = suite.criteria();
    let records =
        if ids.contains(&1) || ids.contains(&2) { Some(oracle_sweep(&grid, settings.pairs, settings.seed)?) } else { None };
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        out.push(match id {
            1 => helstrom_equivalence(records.as_deref().expect("swept")),
            2 => povm_equivalence(records.as_deref().expect("swept")),
            3 => monte_carlo_average(settings.samples, settings.seed)?,
            4 => specialization_coherence()?,
            5 => haar_bridge(&grid)?,
            6 => recoupling(),
            7 => normalization(&grid)?,
            8 => limits()?,
            9 => rate_function()?,
            10 => finite_size_convergence()?,
            _ => figure_data()?,
        });
    }
    Ok(out)
}
