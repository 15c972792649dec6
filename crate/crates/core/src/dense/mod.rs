//! Brute-force reference: explicit operators on `(C^d)^{⊗N}`.
//!
//! Tensor legs are ordered `[System 1 | System 0 | System 2]`, so both
//! hypothesis operators are Kronecker products of two symmetric projectors
//! on contiguous legs. Basis index digits run most significant first.
//!
//! Everything here is deliberately naive: full dense matrices and full
//! eigendecompositions, capped by [`dim_cap`].

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::combinatorics::ProblemSize;
use crate::error::{Error, Result};

mod dump;
mod povm;
mod projector;

pub use dump::{read_operator, write_operator, DumpHeader, DUMP_MAGIC, LEG_TAG};
pub use povm::{
    averaged_states, difference_spectrum, error_of_povm, helstrom_error, mc_average_error, optimal_povm,
    DifferenceSpectrum, McEstimate, PovmPair, ZERO_THRESHOLD,
};
pub use projector::symmetric_projector;

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "QCP_DIM_CAP";

static DIM_CAP_OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Largest Hilbert-space dimension the oracle will build.
///
/// An explicit [`set_dim_cap`] wins over the `QCP_DIM_CAP` environment
/// variable, which wins over [`DEFAULT_DIM_CAP`].
pub fn dim_cap() -> usize {
    match DIM_CAP_OVERRIDE.load(Ordering::Relaxed) {
        0 => std::env::var(DIM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DIM_CAP),
        cap => cap,
    }
}

/// Overrides the dimension cap for this process; `0` restores the default
/// lookup.
pub fn set_dim_cap(cap: usize) {
    DIM_CAP_OVERRIDE.store(cap, Ordering::Relaxed);
}

/// `d^legs`, checked against the cap.
pub(crate) fn checked_dim(d: u64, legs: u64) -> Result<usize> {
    let cap = dim_cap();
    let dim = (d as u128).checked_pow(legs as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim as usize)
}

/// Hilbert-space dimension `d^N` of a problem size, checked against the cap.
pub fn total_dim(size: &ProblemSize) -> Result<usize> {
    checked_dim(size.d(), size.total())
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    amplitudes: DVector<Complex64>,
}

impl PureStateVector {
    /// Normalizes `amplitudes`; rejects the zero vector.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Shape("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(PureStateVector { amplitudes: amplitudes / Complex64::new(norm, 0.0) })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &PureStateVector) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    /// `|self><self|`.
    pub fn density(&self) -> DensityOperator {
        DensityOperator { matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &PureStateVector) -> PureStateVector {
        PureStateVector { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    /// `self^{⊗n}`; the empty power is the scalar `1`.
    pub fn tensor_power(&self, n: u64) -> PureStateVector {
        let mut v = DVector::from_element(1, Complex64::new(1.0, 0.0));
        for _ in 0..n {
            v = v.kronecker(&self.amplitudes);
        }
        PureStateVector { amplitudes: v }
    }
}

/// Haar-random pure state in `C^d`: complex standard normals, normalized.
pub fn haar_random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureStateVector {
    loop {
        let v = DVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        if let Ok(s) = PureStateVector::new(v) {
            return s;
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

impl DensityOperator {
    /// Validates all three invariants. The positivity check is a full
    /// eigendecomposition.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        let asym = max_asymmetry(&matrix);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Domain(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&matrix).min();
        if min < -PSD_TOL {
            return Err(Error::Domain(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(DensityOperator { matrix })
    }

    pub(crate) fn from_real_unchecked(m: DMatrix<f64>) -> Self {
        DensityOperator { matrix: m.map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// The real part, when every imaginary part is exactly zero.
    pub fn as_real(&self) -> Option<DMatrix<f64>> {
        if self.matrix.iter().all(|z| z.im == 0.0) {
            Some(self.matrix.map(|z| z.re))
        } else {
            None
        }
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, through the real solver when the
/// matrix is real.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> DVector<f64> {
    if m.iter().all(|z| z.im == 0.0) {
        nalgebra::SymmetricEigen::new(m.map(|z| z.re)).eigenvalues
    } else {
        nalgebra::SymmetricEigen::new(m.clone()).eigenvalues
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_sampling_is_reproducible() {
        let a = haar_random_pure(3, &mut ChaCha8Rng::seed_from_u64(11));
        let b = haar_random_pure(3, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert!((a.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut mean_rho = DMatrix::<Complex64>::zeros(2, 2);
        for _ in 0..n {
            let a = haar_random_pure(2, &mut rng);
            let b = haar_random_pure(2, &mut rng);
            let q = a.overlap(&b);
            sum += q;
            sum_sq += q * q;
            mean_rho += a.density().matrix();
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "{mean} ± {se}");
        mean_rho /= Complex64::new(n as f64, 0.0);
        // entries of a single |psi><psi| have variance at most 1/6 at d = 2
        let bound = 3.0 * (1.0 / 6.0 / n as f64).sqrt();
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 0.5 } else { 0.0 };
                assert!((mean_rho[(i, j)] - Complex64::new(target, 0.0)).norm() < bound);
            }
        }
    }

    #[test]
    fn tensor_powers() {
        let s = PureStateVector::new(DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])).unwrap();
        assert_eq!(s.tensor_power(0).dim(), 1);
        let p = s.tensor_power(3);
        assert_eq!(p.dim(), 8);
        assert!((p.amplitudes().norm() - 1.0).abs() < 1e-15);
        // |111> carries i^3 / 2^{3/2}
        let z = p.amplitudes()[7] * 8f64.sqrt();
        assert!((z - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn density_operator_validation() {
        let good = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(0.25, 0.0), Complex64::new(0.75, 0.0)]));
        assert!(DensityOperator::new(good).is_ok());
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(-0.5, 0.0), Complex64::new(1.5, 0.0)]));
        assert!(DensityOperator::new(neg).is_err());
        let mut herm = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        herm[(0, 1)] = Complex64::new(0.5, 0.1);
        assert!(matches!(DensityOperator::new(herm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let s = ProblemSize::new(6, 3, 4, 3).unwrap();
        assert!(matches!(total_dim(&s), Err(Error::DimensionCap { .. })));
        assert_eq!(total_dim(&ProblemSize::new(1, 1, 1, 2).unwrap()).unwrap(), 8);
    }
}
