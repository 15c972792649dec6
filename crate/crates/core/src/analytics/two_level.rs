//! The rank-two operator `|a><a|/c1 - |b><b|/c2`.

use crate::error::{Error, Result};

/// Unique negative eigenvalue of `|a><a|/c1 - |b><b|/c2` for unit vectors
/// with `|<a|b>|^2 = overlap_sq`.
///
/// Degenerate inputs (`overlap_sq = 1`, `c1 = c2`) give zero.
pub fn neg_eigenvalue(c1: f64, c2: f64, overlap_sq: f64) -> f64 {
    let delta = c2 - c1;
    let r = (delta * delta + 4.0 * c1 * c2 * (1.0 - overlap_sq)).sqrt();
    (delta - r) / (2.0 * c1 * c2)
}

/// `(|<a|->|^2, |<b|->|^2)` for the eigenvector `|->` of the negative
/// eigenvalue. Requires linearly independent vectors.
pub fn minus_overlaps(c1: f64, c2: f64, overlap_sq: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&overlap_sq) {
        return Err(Error::Domain(format!("overlap_sq = {overlap_sq} must lie in [0, 1)")));
    }
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Domain(format!("weights must be positive, got ({c1}, {c2})")));
    }
    let s2 = 1.0 - overlap_sq;
    let delta = c2 - c1;
    let r = (delta * delta + 4.0 * c1 * c2 * s2).sqrt();
    let a = 0.5 * (1.0 - (delta + 2.0 * c1 * s2) / r);
    let b = 0.5 * (1.0 - (delta - 2.0 * c2 * s2) / r);
    Ok((a, b))
}
