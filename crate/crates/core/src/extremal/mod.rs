//! Construction of polynomials whose positive region shrinks like the
//! reciprocal log of the degree, and their transplant onto spherical caps.
//!
//! The pipeline runs in four stages:
//!
//! 1. a cutoff times a double-exponential profile is corrected by the Cauchy
//!    transform of its `dbar` defect, producing an entire function that is
//!    huge in a right half-strip and uniformly bounded outside it
//!    ([`EntireE`]);
//! 2. Taylor coefficients of its shifted recentering are extracted by FFT on
//!    per-order saddle circles ([`taylor_coefficients`]);
//! 3. truncating at degree `N` and rescaling by a radius `r_N ~ log N` that
//!    passes an explicit tail certificate yields [`ExtremalPolynomial`] on
//!    the unit disc ([`ExtremalFactory`] caches the expensive stages across
//!    degrees);
//! 4. the polynomial transplants onto a geodesic disc on the sphere as a
//!    degree-`N` spherical harmonic with a certified sup deviation
//!    ([`SphericalTransplant`]).

mod cauchy;
mod entire;
mod factory;
mod polynomial;
mod quadrature;
mod transplant;

pub use cauchy::taylor_coefficients;
pub use entire::EntireE;
pub use factory::{ExtremalFactory, PipelineConstants};
pub use polynomial::{ExtremalPolynomial, PositivityReport, Provenance};
pub use quadrature::DbarPotential;
pub use transplant::{SphericalTransplant, TransplantArea};
