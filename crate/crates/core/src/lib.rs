//! Closed-form multipeakon solutions of a two-parameter generalization of the
//! Camassa-Holm equation.
//!
//! The family is parameterized by two real constants `(r, s)` and reduces to
//! the classical Camassa-Holm equation at `r = 0, s = 1`. Its N-peakon
//! solutions
//!
//! ```text
//! u(x, t) = 1/2 Σ_j m_j(t) exp(-2 |x - x_j(t)|)
//! ```
//!
//! are recovered in closed form from Hankel determinants of an explicit moment
//! sequence `A_k(t)`. This crate evaluates those determinants over either
//! exact rationals or `f64`, reconstructs the peak positions and amplitudes,
//! and cross-validates the construction three independent ways:
//!
//! * exact determinant-identity suites ([`hankel`]),
//! * direct numerical integration of the peakon ODE system ([`dynamics`]),
//! * eigenvalue drift of the associated discrete string problem, which is
//!   affine in time with slope `-r` ([`spectral`]).
//!
//! The [`numeric`] module holds the scalar-field abstraction (exact rationals
//! and `f64`), dense determinants, and univariate polynomial calculus the rest
//! of the crate is built on.

pub mod dynamics;
pub mod hankel;
pub mod moments;
pub mod numeric;
pub mod peakon;
pub mod spectral;

pub use dynamics::{compare_closed_form, integrate, rhs_xm, rhs_yg, OdeSettings, Trajectory};
pub use hankel::{ElementSeq, HankelTable, PowerSumLaw, RawSeq, ResidualReport};
pub use moments::{GnchParams, MomentSystem, Preset, SpectralMode};
pub use numeric::{det, poly_det, DensePolynomial, Matrix, Rational, Scalar};
pub use peakon::{peakon_state, string_config, ExactPeakonData, PeakonState, StringConfig};
pub use spectral::{characteristic_polynomial, drift_fit, string_eigenvalues, CharPoly, DriftReport};
