//! SU(2) recoupling: Wigner 6j symbols and Clebsch–Gordan coefficients.
//!
//! [`racah`] holds the general single-sum evaluators (Condon–Shortley phase),
//! which serve as the reference for the stretched closed forms in
//! [`closed_form`]. The latter give the overlap `cos φ_k` between the two
//! multiplicity vectors of each `[N - k, k]` block.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::combinatorics::ProblemSize;

pub mod closed_form;
pub mod racah;

pub use closed_form::{
    cg_edge_args, cg_edge_squared, cos_phi, cos_phi_sq, cos_phi_sq_exact, overlap_from_6j, sin_phi_sq, wigner6j_special,
    wigner6j_stretched,
};
pub use racah::{clebsch_gordan, wigner6j_racah};

/// A half-integer stored exactly as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// `n / 2`.
    pub const fn half(n: i64) -> Self {
        HalfInt(n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Arguments of a 6j symbol laid out as `{a b c; d e f}`.
///
/// The four triads are `(a,b,c)`, `(a,e,f)`, `(d,b,f)` and `(d,e,c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SixJArgs {
    pub a: HalfInt,
    pub b: HalfInt,
    pub c: HalfInt,
    pub d: HalfInt,
    pub e: HalfInt,
    pub f: HalfInt,
}

impl SixJArgs {
    pub fn new(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Self {
        SixJArgs { a, b, c, d, e, f }
    }

    /// From twice-values `[2a, 2b, 2c, 2d, 2e, 2f]`.
    pub fn from_twice(t: [i64; 6]) -> Self {
        let h = HalfInt::from_twice;
        SixJArgs::new(h(t[0]), h(t[1]), h(t[2]), h(t[3]), h(t[4]), h(t[5]))
    }

    pub fn twice(&self) -> [i64; 6] {
        [self.a.0, self.b.0, self.c.0, self.d.0, self.e.0, self.f.0]
    }

    /// The symbol governing block `k` of a changepoint problem:
    /// `{N1/2  M/2  (M+N1)/2 ; N2/2  N/2-k  (M+N2)/2}`.
    pub fn changepoint(size: &ProblemSize, k: u64) -> Self {
        let (m, n1, n2) = (size.m() as i64, size.n1() as i64, size.n2() as i64);
        let n = m + n1 + n2;
        SixJArgs::from_twice([n1, m, m + n1, n2, n - 2 * k as i64, m + n2])
    }

    /// Whether all four triads satisfy the triangle and integer-sum rules.
    pub fn is_admissible(&self) -> bool {
        let [a, b, c, d, e, f] = self.twice();
        triad(a, b, c) && triad(a, e, f) && triad(d, b, f) && triad(d, e, c)
    }
}

impl fmt::Display for SixJArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} {} {}; {} {} {}}}", self.a, self.b, self.c, self.d, self.e, self.f)
    }
}

/// Triangle condition on twice-values, including the integer perimeter rule.
pub(crate) fn triad(a: i64, b: i64, c: i64) -> bool {
    a >= 0 && b >= 0 && c >= 0 && a + b >= c && a + c >= b && b + c >= a && (a + b + c) % 2 == 0
}
