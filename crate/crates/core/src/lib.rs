//! Exact orderings of the positive rationals and the dynamics built on them.
//!
//! The exact types are generic over an unsigned integer [`natural::Natural`]
//! (`u32`, `u64`, `u128` or `BigUint`); floating-point estimators are generic
//! over `num_traits::Float`. The aliases below fix the unbounded choice.

pub mod coding;
pub mod error;
pub mod exact;
pub mod maps;
pub mod minkowski;
pub mod natural;
pub mod operators;
pub mod stochastic;
pub mod sum;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use num_bigint::BigUint;

/// Extended rational `p/q` (with `1/0` for infinity) over `BigUint`.
pub type Rat = exact::ExtRat<BigUint>;
pub type Cf = exact::ContFrac<BigUint>;
pub type Matrix = coding::Mat2<BigUint>;
/// Dyadic rational `k/2^s` over `BigUint`.
pub type Dyad = minkowski::Dyadic<BigUint>;
pub type Chain = stochastic::ChainSpec<BigUint>;
