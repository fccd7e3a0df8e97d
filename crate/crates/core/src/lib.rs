//! Casimir forces on cylindrical pistons from transverse Laplacian spectra,
//! with a pseudo-time Langevin sampler that cross-checks the mode sums.

pub mod force;
pub mod sampler;
pub mod special;
pub mod spectrum;
pub mod summation;
