use std::collections::HashMap;

use nalgebra::DMatrix;

use super::checked_dim;
use crate::error::Result;

/// Projector onto the totally symmetric subspace of `(C^d)^{⊗L}`.
///
/// Built as `V Vᵀ`, one column of `V` per occupation pattern: the uniform
/// superposition of all basis strings with that pattern.
pub fn symmetric_projector(l: u64, d: u64) -> Result<DMatrix<f64>> {
    let dim = checked_dim(d, l)?;
    let d = d as usize;
    let mut columns: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut owner = Vec::with_capacity(dim);
    for index in 0..dim {
        let mut counts = vec![0u32; d];
        let mut x = index;
        for _ in 0..l {
            counts[x % d] += 1;
            x /= d;
        }
        let next = columns.len();
        owner.push(*columns.entry(counts).or_insert(next));
    }
    let mut sizes = vec![0usize; columns.len()];
    for &c in &owner {
        sizes[c] += 1;
    }
    let mut v = DMatrix::<f64>::zeros(dim, columns.len());
    for (row, &c) in owner.iter().enumerate() {
        v[(row, c)] = 1.0 / (sizes[c] as f64).sqrt();
    }
    Ok(&v * v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::dim_symmetric;
    use crate::dense::haar_random_pure;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projector_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..=3u64 {
            for l in 0..=5u64 {
                let s = symmetric_projector(l, d).unwrap();
                assert!((&s * &s - &s).amax() < 1e-12);
                assert!((&s - s.transpose()).amax() == 0.0);
                assert!((s.trace() - dim_symmetric(l, d).to_f64()).abs() < 1e-10);
                let sigma = haar_random_pure(d as usize, &mut rng).tensor_power(l);
                let sc = s.map(|x| Complex64::new(x, 0.0));
                let projected = &sc * sigma.amplitudes();
                assert!((projected - sigma.amplitudes()).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(symmetric_projector(1, 3).unwrap(), DMatrix::identity(3, 3));
        let s = symmetric_projector(2, 2).unwrap();
        let singlet = nalgebra::DVector::from_vec(vec![0.0, 1.0, -1.0, 0.0]);
        assert!((&s * singlet).amax() < 1e-15);
        assert!((s.trace() - 3.0).abs() < 1e-15);
        assert_eq!(symmetric_projector(0, 2).unwrap(), DMatrix::identity(1, 1));
    }
}
