//! Scalar building blocks: power series, log-scaled complex arithmetic,
//! the smooth plane cutoff, and Legendre derivative tables.

mod cutoff;
mod legendre;
mod scaled;
mod series;

pub use cutoff::CutoffSpec;
pub use legendre::{legendre_derivative, LegendreTable};
pub use scaled::{double_exponential, ScaledComplex};
pub use series::CoefficientSeries;
