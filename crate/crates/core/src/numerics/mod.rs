//! Numerical building blocks shared by the solvers.

pub mod bessel;
pub mod expint;
pub mod quadrature;
pub mod spline;
pub mod tridiag;

pub use tridiag::{solve_tridiagonal, Scalar, TridiagonalLu};
