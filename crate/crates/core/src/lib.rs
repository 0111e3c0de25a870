//! Numerical laboratory for the nodal geometry of Laplace eigenfunctions.
//!
//! The crate is organised around one pipeline and the instruments it needs:
//!
//! * [`field`] - scalar building blocks: truncated power series, log-scaled
//!   complex arithmetic for `exp(exp z)`-sized values, the smooth plane cutoff,
//!   and Legendre polynomials with derivative columns.
//! * [`metrics`] - measurements on discs and circles: sign changes, argument
//!   oscillation, doubling exponents, positivity areas, nodal length.
//! * [`extremal`] - construction of entire functions approximating
//!   `exp(exp z)` in a semi-strip, their Taylor sections, and polynomials whose
//!   positivity set in the unit disc has area `O(1/log N)`, plus the
//!   transplantation of those polynomials onto the sphere.
//! * [`sphere`] - spherical harmonics vanishing at a marked point, random
//!   eigenfunctions, Laplace-Beltrami residuals, doubling and nodal-length
//!   statistics.
//! * [`schrodinger`] - small-potential Schrödinger fields on the disc: Green
//!   potentials, positive solutions, Beltrami coefficients, the frequency
//!   integral `J(r)` and its log-convexity, and three-circle inequalities.
//! * [`nadirashvili`] - derivative-free minimisation of positivity area over
//!   harmonic polynomials with a sign-change budget on the unit circle.
//!
//! Empirical constants produced anywhere in the pipeline are outputs that get
//! recorded, never hard-coded pass thresholds.

pub mod error;
pub mod extremal;
pub mod field;
pub mod metrics;
pub mod nadirashvili;
pub mod schrodinger;
pub mod sphere;
pub mod util;

pub use error::{NodalError, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
