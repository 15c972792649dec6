use serde::Serialize;

use super::rate::{rate, RateResult};
use crate::analytics::OverlapQ;
use crate::error::{Error, Result};

/// The two rate plots: against `q` at `α = 5`, and against `α` at `q = 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Figure {
    #[serde(rename = "rate-vs-q")]
    RateVsOverlap,
    #[serde(rename = "rate-vs-alpha")]
    RateVsAlpha,
}

impl Figure {
    pub fn from_number(n: u32) -> Result<Self> {
        match n {
            2 => Ok(Figure::RateVsOverlap),
            3 => Ok(Figure::RateVsAlpha),
            _ => Err(Error::Domain(format!("no figure {n}; expected 2 or 3"))),
        }
    }

    /// Name of the swept variable.
    pub fn x_label(self) -> &'static str {
        match self {
            Figure::RateVsOverlap => "q",
            Figure::RateVsAlpha => "alpha",
        }
    }

    /// `q = i/100` for `i = 1..=100` at `α = 5`, or `α = 1..=100` at `q = 0.5`.
    pub fn rows(self) -> Result<Vec<RateResult>> {
        match self {
            Figure::RateVsOverlap => (1..=100).map(|i| rate(5.0, OverlapQ::new(i as f64 / 100.0)?)).collect(),
            Figure::RateVsAlpha => (1..=100).map(|a| rate(a as f64, OverlapQ::new(0.5)?)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let f2 = Figure::from_number(2).unwrap().rows().unwrap();
        assert_eq!(f2.len(), 100);
        assert_eq!(f2.last().unwrap().h_min, 0.0);
        let f3 = Figure::from_number(3).unwrap().rows().unwrap();
        assert_eq!((f3[0].alpha, f3[99].alpha), (1.0, 100.0));
        assert!(Figure::from_number(4).is_err());
    }
}
