//! Numerical operator theory on finite-dimensional Hilbert spaces.
//!
//! Hermitian matrices stand in for selfadjoint operators. On top of a small dense
//! linear-algebra layer the crate provides double operator integrals (Schur multipliers in
//! joint eigenbases), a spectral-gap Sylvester solver, several routes to Krein's spectral
//! shift function, and discrete position/momentum quantization on `Z_n`.

pub mod doi;
pub mod error;
pub mod linalg;
pub mod quantization;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod shift;
pub mod sylvester;

pub use error::{Error, Result};
pub use num_complex::Complex64;
