//! Arbitrary-precision scalars, symmetric matrices and eigensolvers.

pub mod bigreal;
pub mod eigen;
pub mod matrix;
pub mod optimize;
pub mod quadrature;

pub use bigreal::{dot, policy_digits, sum_ordered, BigReal, Precision};
pub use eigen::{
    band_reduce_givens, band_to_tridiagonal, banded_lowest, dense_eigen_small, eigenvalues_bisection,
    gershgorin, jacobi_dense, sturm_count, LanczosResult, SeedRule, DENSE_LIMIT,
};
pub use matrix::{Parity, Spectrum, SymBandedMatrix, SymTridiagonalMatrix};
pub use optimize::{bisect_root, golden_section};
pub use quadrature::{tanh_sinh, QuadratureResult};
