//! Finite-size error probabilities of the optimal changepoint measurement.
//!
//! [`avg_error_min`] is the Haar-averaged minimum error, with three
//! specialized closed forms kept as independent evaluations.
//! [`error_given_overlap`] is the error of the same measurement for a fixed
//! pair of candidate states with overlap `q`.

use std::fmt;

use serde::Serialize;

use crate::combinatorics::{BigCount, ProblemSize};
use crate::error::{Error, Result};

mod averaged;
mod per_pair;
mod two_level;

pub use averaged::{avg_error_min, avg_error_min_d2, avg_error_min_equal, avg_error_min_equal_d2};
pub use per_pair::{error_given_overlap, haar_average_check, p_k, q_k, PerPairCoefficients};
pub use two_level::{minus_overlaps, neg_eigenvalue};

/// Overlap `q = Tr[rho1 rho2]` of the two candidate states.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct OverlapQ(f64);

impl OverlapQ {
    pub const ZERO: OverlapQ = OverlapQ(0.0);
    pub const ONE: OverlapQ = OverlapQ(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&q) {
            Ok(OverlapQ(q))
        } else {
            Err(Error::InvalidOverlap(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which closed form produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FormulaPath {
    #[serde(rename = "averaged/general")]
    AveragedGeneral,
    #[serde(rename = "averaged/qubit")]
    AveragedQubit,
    #[serde(rename = "averaged/equal")]
    AveragedEqual,
    #[serde(rename = "averaged/equal-qubit")]
    AveragedEqualQubit,
    #[serde(rename = "per-pair/general")]
    PerPair,
    #[serde(rename = "limit/n1-infinite")]
    LimitN1Infinite,
    #[serde(rename = "limit/discrimination-average")]
    DiscriminationAverage,
    #[serde(rename = "limit/m-infinite")]
    LimitMInfinite,
    #[serde(rename = "comparison/error")]
    ComparisonError,
    #[serde(rename = "comparison/average")]
    ComparisonAverage,
    #[serde(rename = "rate/closed-form")]
    Rate,
    #[serde(rename = "rate/finite-size")]
    FiniteSizeRate,
}

impl FormulaPath {
    pub fn as_str(self) -> &'static str {
        match self {
            FormulaPath::AveragedGeneral => "averaged/general",
            FormulaPath::AveragedQubit => "averaged/qubit",
            FormulaPath::AveragedEqual => "averaged/equal",
            FormulaPath::AveragedEqualQubit => "averaged/equal-qubit",
            FormulaPath::PerPair => "per-pair/general",
            FormulaPath::LimitN1Infinite => "limit/n1-infinite",
            FormulaPath::DiscriminationAverage => "limit/discrimination-average",
            FormulaPath::LimitMInfinite => "limit/m-infinite",
            FormulaPath::ComparisonError => "comparison/error",
            FormulaPath::ComparisonAverage => "comparison/average",
            FormulaPath::Rate => "rate/closed-form",
            FormulaPath::FiniteSizeRate => "rate/finite-size",
        }
    }
}

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contribution of the `[N - k, k]` block to an error probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KTerm {
    pub k: u64,
    pub dim: BigCount,
    pub cos_phi: f64,
    pub term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_k: Option<f64>,
}

/// An error probability together with its per-block decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub value: f64,
    pub per_k: Vec<KTerm>,
    pub formula_path: FormulaPath,
    pub relabeled: bool,
    pub size: ProblemSize,
}

impl ErrorReport {
    /// Sum of the per-block terms; equals `value` up to rounding.
    pub fn reconstructed(&self) -> f64 {
        self.per_k.iter().map(|t| t.term).sum()
    }
}
