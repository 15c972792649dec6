use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    haar_random_pure, hermitian_eigenvalues, max_asymmetry, symmetric_projector, total_dim, DensityOperator,
    PureStateVector, HERMITIAN_TOL,
};
use crate::combinatorics::{a1, a2, ProblemSize};
use crate::error::{Error, Result};

/// Eigenvalues with `|λ| <= ZERO_THRESHOLD` count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-10;

const POVM_TOL: f64 = 1e-10;

/// `(S_{N1} ⊗ S_{M+N2}) / A1` and `(S_{M+N1} ⊗ S_{N2}) / A2`.
pub fn averaged_states(size: &ProblemSize) -> Result<(DensityOperator, DensityOperator)> {
    let (h1, h2) = averaged_real(size)?;
    Ok((DensityOperator::from_real_unchecked(h1), DensityOperator::from_real_unchecked(h2)))
}

fn averaged_real(size: &ProblemSize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    total_dim(size)?;
    let (m, n1, n2, d) = (size.m(), size.n1(), size.n2(), size.d());
    let h1 = symmetric_projector(n1, d)?.kronecker(&symmetric_projector(m + n2, d)?) / a1(size).to_f64();
    let h2 = symmetric_projector(m + n1, d)?.kronecker(&symmetric_projector(n2, d)?) / a2(size).to_f64();
    Ok((h1, h2))
}

/// Full eigendecomposition of the difference of the two averaged operators.
#[derive(Clone, Debug)]
pub struct DifferenceSpectrum {
    size: ProblemSize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

pub fn difference_spectrum(size: &ProblemSize) -> Result<DifferenceSpectrum> {
    let (h1, h2) = averaged_real(size)?;
    let eig = SymmetricEigen::new(h1 - h2);
    Ok(DifferenceSpectrum { size: *size, eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
}

impl DifferenceSpectrum {
    pub fn size(&self) -> &ProblemSize {
        &self.size
    }

    /// Unsorted eigenvalues; column `i` of [`Self::eigenvectors`] belongs to entry `i`.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Eigenvalues below `-ZERO_THRESHOLD`, ascending.
    pub fn negative_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().filter(|&x| x < -ZERO_THRESHOLD).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `½(1 - ½ Σ|λ|)`.
    pub fn helstrom_error(&self) -> f64 {
        0.5 * (1.0 - 0.5 * self.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Projector onto the strictly negative eigenspaces.
    pub fn optimal_povm(&self) -> PovmPair {
        let cols: Vec<usize> = (0..self.eigenvalues.len()).filter(|&i| self.eigenvalues[i] < -ZERO_THRESHOLD).collect();
        let basis = self.eigenvectors.select_columns(cols.iter());
        PovmPair::Projector { basis }
    }
}

pub fn optimal_povm(size: &ProblemSize) -> Result<PovmPair> {
    Ok(difference_spectrum(size)?.optimal_povm())
}

/// `½(1 - ½ ||s1 - s2||_1)`.
pub fn helstrom_error(s1: &DensityOperator, s2: &DensityOperator) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::Shape(format!("{} vs {}", s1.dim(), s2.dim())));
    }
    let diff = s1.matrix() - s2.matrix();
    let asym = max_asymmetry(&diff);
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }
    let norm: f64 = hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum();
    Ok(0.5 * (1.0 - 0.5 * norm))
}

/// A two-outcome measurement, described by the effect `E2` of guessing the
/// second hypothesis; `E1 = I - E2`.
#[derive(Clone, Debug, PartialEq)]
pub enum PovmPair {
    /// `E2 = B Bᵀ` for a real matrix `B` with orthonormal columns.
    Projector { basis: DMatrix<f64> },
    General { e2: DMatrix<Complex64> },
}

impl PovmPair {
    /// Validates `0 <= E2 <= I`.
    pub fn general(e2: DMatrix<Complex64>) -> Result<Self> {
        if !e2.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", e2.nrows(), e2.ncols())));
        }
        let asym = max_asymmetry(&e2);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let ev = hermitian_eigenvalues(&e2);
        if ev.min() < -POVM_TOL || ev.max() > 1.0 + POVM_TOL {
            return Err(Error::Domain(format!("E2 eigenvalues span [{:e}, {:e}]", ev.min(), ev.max())));
        }
        Ok(PovmPair::General { e2 })
    }

    /// `E2 = 0`: always guess the first hypothesis.
    pub fn trivial(dim: usize) -> Self {
        PovmPair::Projector { basis: DMatrix::zeros(dim, 0) }
    }

    pub fn dim(&self) -> usize {
        match self {
            PovmPair::Projector { basis } => basis.nrows(),
            PovmPair::General { e2 } => e2.nrows(),
        }
    }

    /// Rank of `E2` when it is stored as a projector.
    pub fn rank(&self) -> Option<usize> {
        match self {
            PovmPair::Projector { basis } => Some(basis.ncols()),
            PovmPair::General { .. } => None,
        }
    }

    pub fn e2(&self) -> DMatrix<Complex64> {
        match self {
            PovmPair::Projector { basis } => (basis * basis.transpose()).map(|x| Complex64::new(x, 0.0)),
            PovmPair::General { e2 } => e2.clone(),
        }
    }

    /// `<ψ|E2|ψ>`.
    pub fn expectation(&self, psi: &PureStateVector) -> f64 {
        let a = psi.amplitudes();
        match self {
            PovmPair::Projector { basis } => {
                let re = basis.tr_mul(&a.map(|z| z.re));
                let im = basis.tr_mul(&a.map(|z| z.im));
                re.norm_squared() + im.norm_squared()
            }
            PovmPair::General { e2 } => a.dotc(&(e2 * a)).re,
        }
    }
}

/// Error of `povm` when the candidates are `rho1` and `rho2`, equal priors:
/// `½<ψa|E2|ψa> + ½(1 - <ψb|E2|ψb>)` with `ψa = rho1^{⊗N1} ⊗ rho2^{⊗(M+N2)}`
/// and `ψb = rho1^{⊗(M+N1)} ⊗ rho2^{⊗N2}`.
///
/// Labels follow the canonical `size`: `rho1` feeds System 1 after any
/// relabeling.
pub fn error_of_povm(
    rho1: &PureStateVector,
    rho2: &PureStateVector,
    size: &ProblemSize,
    povm: &PovmPair,
) -> Result<f64> {
    let d = size.d() as usize;
    if rho1.dim() != d || rho2.dim() != d {
        return Err(Error::Shape(format!("states of dimension {} and {} for d = {d}", rho1.dim(), rho2.dim())));
    }
    let dim = total_dim(size)?;
    if povm.dim() != dim {
        return Err(Error::Shape(format!("POVM of dimension {} for d^N = {dim}", povm.dim())));
    }
    let (m, n1, n2) = (size.m(), size.n1(), size.n2());
    let psi_a = rho1.tensor_power(n1).kron(&rho2.tensor_power(m + n2));
    let psi_b = rho1.tensor_power(m + n1).kron(&rho2.tensor_power(n2));
    Ok(0.5 * povm.expectation(&psi_a) + 0.5 * (1.0 - povm.expectation(&psi_b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Monte Carlo average of [`error_of_povm`] over independent Haar pairs.
///
/// Sample `i` draws from ChaCha8 seeded with `seed` on stream `i`, so the
/// result does not depend on the thread count. With `povm = None` the
/// optimal measurement is used.
pub fn mc_average_error(size: &ProblemSize, povm: Option<&PovmPair>, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let owned;
    let povm = match povm {
        Some(p) => p,
        None => {
            owned = optimal_povm(size)?;
            &owned
        }
    };
    let d = size.d() as usize;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let r1 = haar_random_pure(d, &mut rng);
            let r2 = haar_random_pure(d, &mut rng);
            error_of_povm(&r1, &r2, size, povm)
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { mean, standard_error: (var / n).sqrt(), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{avg_error_min, error_given_overlap, OverlapQ};
    use nalgebra::DVector;

    fn size(m: u64, n1: u64, n2: u64, d: u64) -> ProblemSize {
        ProblemSize::new(m, n1, n2, d).unwrap()
    }

    fn basis_state(d: usize, i: usize) -> PureStateVector {
        let mut v = DVector::zeros(d);
        v[i] = Complex64::new(1.0, 0.0);
        PureStateVector::new(v).unwrap()
    }

    #[test]
    fn averaged_states_are_normalized() {
        for s in [size(0, 1, 2, 2), size(1, 1, 1, 2), size(2, 1, 2, 3)] {
            let (h1, h2) = averaged_states(&s).unwrap();
            assert!((h1.trace() - 1.0).abs() < 1e-12);
            assert!((h2.trace() - 1.0).abs() < 1e-12);
        }
        let (h1, h2) = averaged_states(&size(0, 2, 3, 2)).unwrap();
        assert!((h1.matrix() - h2.matrix()).camax() < 1e-15);
    }

    #[test]
    fn optimal_povm_ranks() {
        assert_eq!(optimal_povm(&size(0, 2, 2, 2)).unwrap().rank(), Some(0));
        // dim [2,1] at d = 2
        assert_eq!(optimal_povm(&size(1, 1, 1, 2)).unwrap().rank(), Some(2));
        // dim [3,1] + dim [2,2] at d = 2
        assert_eq!(optimal_povm(&size(1, 1, 2, 2)).unwrap().rank(), Some(4));
        let e2 = optimal_povm(&size(1, 1, 2, 2)).unwrap().e2();
        assert!((&e2 * &e2 - &e2).camax() < 1e-10);
    }

    #[test]
    fn helstrom_examples() {
        let a = basis_state(2, 0);
        let b = basis_state(2, 1);
        assert_eq!(helstrom_error(&a.density(), &a.density()).unwrap(), 0.5);
        assert!(helstrom_error(&a.density(), &b.density()).unwrap().abs() < 1e-15);
        let c = PureStateVector::new(DVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])).unwrap();
        let q = a.overlap(&c);
        let expected = 0.5 * (1.0 - (1.0 - q).sqrt());
        assert!((helstrom_error(&a.density(), &c.density()).unwrap() - expected).abs() < 1e-14);
        assert!(helstrom_error(&a.density(), &basis_state(3, 0).density()).is_err());
    }

    #[test]
    fn helstrom_matches_small_averages() {
        for s in [size(1, 1, 1, 2), size(1, 1, 2, 2), size(2, 1, 3, 2)] {
            let dense = difference_spectrum(&s).unwrap().helstrom_error();
            let (h1, h2) = averaged_states(&s).unwrap();
            assert!((helstrom_error(&h1, &h2).unwrap() - dense).abs() < 1e-13);
            assert!((dense - avg_error_min(&s).value).abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn povm_error_examples() {
        let s = size(1, 1, 1, 2);
        let a = basis_state(2, 0);
        let b = basis_state(2, 1);
        assert_eq!(error_of_povm(&a, &b, &s, &PovmPair::trivial(8)).unwrap(), 0.5);
        let v = error_of_povm(&a, &b, &s, &optimal_povm(&s).unwrap()).unwrap();
        let analytic = error_given_overlap(&s, OverlapQ::ZERO).value;
        assert!((v - analytic).abs() < 1e-12);
        assert!((v - 0.211_324_865_405_187_1).abs() < 1e-12);
        assert!(error_of_povm(&a, &basis_state(3, 0), &s, &PovmPair::trivial(8)).is_err());
        assert!(error_of_povm(&a, &b, &s, &PovmPair::trivial(4)).is_err());
    }

    #[test]
    fn general_povm_validation() {
        let ok = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(0.3, 0.0), Complex64::new(1.0, 0.0)]));
        assert!(PovmPair::general(ok).is_ok());
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.0)]));
        assert!(PovmPair::general(bad).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let s = size(1, 1, 1, 2);
        let a = mc_average_error(&s, None, 200, 9).unwrap();
        let b = mc_average_error(&s, None, 200, 9).unwrap();
        assert_eq!(a, b);
        let z = mc_average_error(&size(0, 1, 1, 2), None, 100, 1).unwrap();
        assert_eq!((z.mean, z.standard_error), (0.5, 0.0));
        assert!(mc_average_error(&s, None, 1, 0).is_err());
    }
}
