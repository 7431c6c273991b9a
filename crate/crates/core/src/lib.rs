//! Fourier spectral solver for the spatially homogeneous Boltzmann equation
//! with cutoff kernels `B = |v - v*|^gamma` on a truncated, periodized velocity
//! domain.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. In that configuration the 3-D transforms fall back to a separable
//! direct DFT, which is exact but only practical for small grids; `std`
//! enables `rustfft` plans and `rayon` parallelism in the fast gain path.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod collision;
pub mod diagnostics;
mod error;
pub mod fft;
pub mod smoothing;
pub mod stepping;
pub mod torus;

pub use error::Error;
pub use torus::{PhysicalField, SpectralField, TorusSpec};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Plain 3-vector of velocities.
pub type Vec3 = [f64; 3];

pub(crate) fn norm(v: &Vec3) -> f64 {
    #[cfg(not(feature = "std"))]
    use num_traits::Float;
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
