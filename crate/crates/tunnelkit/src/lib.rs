//! High-precision spectral laboratory for one-dimensional tunneling problems.
//!
//! Exact spectra come from truncated Fock-space and plane-wave Hamiltonians and
//! from a shooting integrator; semiclassical predictions come from instanton
//! calculus. The `analysis` module compares the two.

pub mod error;
pub mod numerics;

pub use error::{Result, TunnelError};
pub use numerics::{BigReal, Parity, Precision, Spectrum, SymBandedMatrix, SymTridiagonalMatrix};
pub mod analysis;
pub mod fock;
pub mod instanton;
pub mod planewave;
pub mod potentials;
pub mod shooting;
