pub mod analytics;
pub mod asymptotics;
pub mod combinatorics;
pub mod dense;
pub mod error;
pub mod quadrature;
pub mod recoupling;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problem-sizes.md")]
    mod problem_sizes {}
    #[doc = include_str!("../../../book/src/recoupling.md")]
    mod recoupling {}
    #[doc = include_str!("../../../book/src/averaged-error.md")]
    mod averaged_error {}
    #[doc = include_str!("../../../book/src/per-pair-error.md")]
    mod per_pair_error {}
    #[doc = include_str!("../../../book/src/large-sizes.md")]
    mod large_sizes {}
    #[doc = include_str!("../../../book/src/decay-rate.md")]
    mod decay_rate {}
    #[doc = include_str!("../../../book/src/dense-oracle.md")]
    mod dense_oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
