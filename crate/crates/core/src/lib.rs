//! Core numerics for the linearised fluid-loaded plate: dispersion analysis,
//! spectral solution of the Cauchy problem on the full line, the half-line
//! solver built on contour integrals and a weakly singular Volterra equation,
//! and residual evaluators for the nonlinear non-local formulation.
//!
//! The crate is `no_std` (with `alloc`); all file formats, CLI plumbing and
//! IO live in the companion `flp-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dispersion;
pub mod error;
pub mod fullline;
pub mod halfline;
pub mod nonlocal;
pub mod params;
pub mod quad;
pub mod spectral;
pub mod volterra;

pub use error::Error;
pub use params::PlateParams;

/// Complex double used throughout.
pub type C64 = num_complex::Complex<f64>;
