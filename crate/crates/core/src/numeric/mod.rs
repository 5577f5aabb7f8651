//! Scalar fields, dense matrices, and univariate polynomials.
//!
//! Everything downstream works over one of two field instantiations: exact
//! arbitrary-precision rationals ([`Rational`]) or `f64`. The [`Scalar`] trait
//! is the common surface; determinants pick their algorithm per field
//! (fraction-free Bareiss elimination on the exact path, partially pivoted LU
//! on the float path).

mod matrix;
mod poly;
mod scalar;

pub use matrix::{det, poly_det, Matrix};
pub use poly::DensePolynomial;
pub use scalar::{powi, Rational, Scalar};
