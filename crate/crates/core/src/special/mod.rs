//! Real-argument special functions used by the spectrum and force modules.

mod bessel_j;
mod bessel_k;
mod zeros;

use thiserror::Error;

pub use bessel_j::{bessel_j, bessel_j_prime, ASYMPTOTIC_CROSSOVER};
pub use bessel_k::bessel_k;
pub use zeros::{bessel_j_prime_zeros, bessel_j_zeros, zeros_below, ZeroKind, ZeroList};

pub(crate) use bessel_k::k0_plus_k2;

/// Apery's constant.
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFunctionError {
    #[error("{function}: argument {arg} outside the domain")]
    Domain { function: &'static str, arg: f64 },
    #[error("order {0} is not supported")]
    UnsupportedOrder(u32),
    #[error("zero count must be at least 1")]
    InvalidCount,
}
