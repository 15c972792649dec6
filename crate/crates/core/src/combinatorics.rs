//! Exact counting: binomials, symmetric-subspace and two-row Young-diagram
//! dimensions, and the normalizers of the two averaged hypothesis operators.
//!
//! Counts are carried exactly as [`BigCount`]. Floating consumers either
//! convert through [`BigCount::to_f64`] / [`ratio_to_f64`] (exact rounding) or
//! stay in log space with [`log_factorial`] and [`ln_binomial`] when factorial
//! arguments grow past [`EXACT_FACTORIAL_LIMIT`].

use std::fmt;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest factorial argument evaluated through the exact rational path by
/// closed-form routines; larger arguments switch to log space.
pub const EXACT_FACTORIAL_LIMIT: u64 = 170;

/// Largest total copy count for which exact big-integer counts are the
/// default carrier.
pub const EXACT_COUNT_LIMIT: u64 = 300;

const TABLE_LEN: usize = 1024;

/// Arbitrary-precision nonnegative integer used for every exact count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn new(value: BigUint) -> Self {
        BigCount(value)
    }

    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    /// Nearest double; `+inf` once the value leaves the `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural logarithm, accurate for values far beyond the `f64` range.
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Mul for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for BigCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// The copy counts `(M, N1, N2)` of Systems 0, 1 and 2 together with the
/// local dimension `d`.
///
/// Always stored in canonical form `N1 <= N2`. Constructing from inputs with
/// `N1 > N2` swaps Systems 1 and 2 (and therefore the two hypothesis labels)
/// and sets [`ProblemSize::relabeled`]. Error probabilities are invariant
/// under the swap because the hypotheses have equal priors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProblemSize {
    m: u64,
    n1: u64,
    n2: u64,
    d: u64,
    relabeled: bool,
}

impl ProblemSize {
    pub fn new(m: u64, n1: u64, n2: u64, d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSize(format!("local dimension d = {d} must be at least 2")));
        }
        if m + n1 + n2 == 0 {
            return Err(Error::InvalidSize("at least one copy is required (M + N1 + N2 >= 1)".into()));
        }
        let relabeled = n1 > n2;
        let (n1, n2) = if relabeled { (n2, n1) } else { (n1, n2) };
        Ok(ProblemSize { m, n1, n2, d, relabeled })
    }

    /// Copies in System 0 (the segment between the two candidates).
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Total number of copies `N = M + N1 + N2`.
    pub fn total(&self) -> u64 {
        self.m + self.n1 + self.n2
    }

    /// Whether the caller's Systems 1 and 2 were swapped to reach `N1 <= N2`.
    pub fn relabeled(&self) -> bool {
        self.relabeled
    }

    /// Largest two-row diagram index occurring in the second hypothesis,
    /// `min(M + N1, N2)`.
    pub fn k_max(&self) -> u64 {
        (self.m + self.n1).min(self.n2)
    }

    /// Same size with a different local dimension.
    pub fn with_d(&self, d: u64) -> Result<Self> {
        let mut s = ProblemSize::new(self.m, self.n1, self.n2, d)?;
        s.relabeled = self.relabeled;
        Ok(s)
    }
}

impl fmt::Display for ProblemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(M={}, N1={}, N2={}, d={})", self.m, self.n1, self.n2, self.d)
    }
}

/// A Young diagram with at most two rows, `[lambda1, lambda2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct YoungDiagram2 {
    lambda1: u64,
    lambda2: u64,
}

impl YoungDiagram2 {
    pub fn new(lambda1: u64, lambda2: u64) -> Result<Self> {
        if lambda2 > lambda1 {
            return Err(Error::Domain(format!(
                "Young diagram rows must be non-increasing, got [{lambda1}, {lambda2}]"
            )));
        }
        Ok(YoungDiagram2 { lambda1, lambda2 })
    }

    pub fn lambda1(&self) -> u64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> u64 {
        self.lambda2
    }
}

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(BigUint::one());
        for i in 1..TABLE_LEN {
            let next = &t[i - 1] * BigUint::from(i as u64);
            t.push(next);
        }
        t
    })
}

/// Exact `n!`.
pub fn factorial(n: u64) -> BigUint {
    let table = factorial_table();
    if (n as usize) < table.len() {
        return table[n as usize].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for i in table.len() as u64..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// Exact binomial coefficient; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigCount {
    if k < 0 || k as u64 > n {
        return BigCount::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    // acc = C(n - k + i, i) after step i; each division is exact.
    for i in 1..=k {
        acc *= BigUint::from(n - k + i);
        acc /= BigUint::from(i);
    }
    BigCount(acc)
}

/// Dimension of the totally symmetric subspace of `(C^d)^{⊗L}`,
/// `C(L + d - 1, d - 1)`.
pub fn dim_symmetric(l: u64, d: u64) -> BigCount {
    binomial(l + d - 1, d as i64 - 1)
}

/// Dimension of the irreducible `U(d)` representation labelled by a two-row
/// Young diagram.
pub fn dim_young2(diag: YoungDiagram2, d: u64) -> Result<BigCount> {
    if d < 2 {
        return Err(Error::Domain(format!("two-row dimension formula needs d >= 2, got {d}")));
    }
    let (l1, l2) = (diag.lambda1, diag.lambda2);
    let num = factorial(l1 + d - 1) * factorial(l2 + d - 2) * BigUint::from(l1 - l2 + 1);
    let den = factorial(d - 1) * factorial(d - 2) * factorial(l1 + 1) * factorial(l2);
    debug_assert!((&num % &den).is_zero());
    Ok(BigCount(num / den))
}

/// `ln dim[N - k, k]`, from log-factorials.
pub fn ln_dim_block(size: &ProblemSize, k: u64) -> f64 {
    let (l1, l2, d) = (size.total() - k, k, size.d());
    ln_factorial_ratio(&[l1 + d - 1, l2 + d - 2], &[d - 1, d - 2, l1 + 1, l2]) + ((l1 - l2 + 1) as f64).ln()
}

/// `ln Tr[S_L] = ln C(L + d - 1, d - 1)`.
pub fn ln_dim_symmetric(l: u64, d: u64) -> f64 {
    ln_binomial(l + d - 1, d as i64 - 1)
}

/// Dimension of the block `[N - k, k]` for a given problem size.
pub fn dim_block(size: &ProblemSize, k: u64) -> BigCount {
    let n = size.total();
    // k <= N/2 for every block that occurs; the constructor cannot fail here.
    dim_young2(YoungDiagram2 { lambda1: n - k, lambda2: k }, size.d()).expect("d >= 2 by construction")
}

/// Normalizer of the first averaged hypothesis,
/// `Tr[S_{N1}] Tr[S_{M+N2}]`.
pub fn a1(size: &ProblemSize) -> BigCount {
    &dim_symmetric(size.n1(), size.d()) * &dim_symmetric(size.m() + size.n2(), size.d())
}

/// Normalizer of the second averaged hypothesis,
/// `Tr[S_{M+N1}] Tr[S_{N2}]`.
pub fn a2(size: &ProblemSize) -> BigCount {
    &dim_symmetric(size.m() + size.n1(), size.d()) * &dim_symmetric(size.n2(), size.d())
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 significant bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| factorial_table().iter().map(ln_biguint).collect())
}

/// `ln(n!)`.
///
/// Tabulated from exact factorials below 1024, Stirling series above; the
/// relative error is below `1e-15` throughout.
pub fn log_factorial(n: u64) -> f64 {
    let table = ln_factorial_table();
    if (n as usize) < table.len() {
        return table[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/12x - 1/360x^3 + 1/1260x^5 - 1/1680x^7
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln C(n, k)`, or `-inf` outside `0 <= k <= n`.
pub fn ln_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k as u64) - log_factorial(n - k as u64)
}

/// Exactly rounded `num / den`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let r = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
    rational_to_f64(&r)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out of range: fall back to logarithms of the parts.
        let ln = ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude());
        let sign = if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
        sign * ln.exp()
    })
}

/// `prod(num_i!) / prod(den_j!)` as a double.
///
/// Exact rational evaluation while every argument is at most
/// [`EXACT_FACTORIAL_LIMIT`], log space otherwise.
pub fn factorial_ratio(num: &[u64], den: &[u64]) -> f64 {
    let max = num.iter().chain(den).copied().max().unwrap_or(0);
    if max <= EXACT_FACTORIAL_LIMIT {
        let n = num.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        let d = den.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        ratio_to_f64(&n, &d)
    } else {
        ln_factorial_ratio(num, den).exp()
    }
}

/// `ln(prod(num_i!) / prod(den_j!))`.
///
/// The ratio is formed exactly first when every argument is at most
/// [`EXACT_FACTORIAL_LIMIT`], so the result carries a single rounding.
pub fn ln_factorial_ratio(num: &[u64], den: &[u64]) -> f64 {
    let max = num.iter().chain(den).copied().max().unwrap_or(0);
    if max <= EXACT_FACTORIAL_LIMIT {
        let r = factorial_ratio(num, den);
        if r.is_normal() {
            return r.ln();
        }
    }
    num.iter().map(|&x| log_factorial(x)).sum::<f64>() - den.iter().map(|&x| log_factorial(x)).sum::<f64>()
}
