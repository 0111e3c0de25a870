//! Measurable quantities of planar fields: doubling exponents, sign changes
//! on circles, argument oscillation, positivity area, zero counts, and nodal
//! length.
//!
//! Everything here works on closures. A "real field" is `Fn(C64) -> f64`, an
//! "analytic field" is `Fn(C64) -> C64`; evaluator panics propagate. The
//! heavier scans (area, disc maxima) parallelize by domain decomposition and
//! collect per-task results in deterministic order, so outputs do not depend
//! on thread count.

mod area;
mod circle;
mod doubling;
mod length;

pub use area::{positivity_area, AreaMethod};
pub use circle::{
    arg_oscillation, arg_profile, max_on_circle, nodal_intersections, sign_changes_on_circle,
    zero_count, ArgProfile,
};
pub use doubling::{doubling_exponent, doubling_exponent_grid, doubling_sup};
pub use length::{nodal_length_chart, nodal_length_disc};

use crate::{C64, NodalError, Result};

/// A closed disc in the plane. `half()` gives the concentric disc of half the
/// radius, the inner disc of every doubling ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(NodalError::Precondition(format!(
                "disc radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Disc { center, radius })
    }

    pub fn unit() -> Self {
        Disc {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn half(&self) -> Self {
        Disc {
            center: self.center,
            radius: 0.5 * self.radius,
        }
    }

    /// Point at polar coordinates relative to the center; `rho` is an
    /// absolute radius, not a fraction of `self.radius`.
    pub fn point(&self, rho: f64, theta: f64) -> C64 {
        self.center + C64::new(rho * theta.cos(), rho * theta.sin())
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// An area measurement with an explicit error bar and the method that
/// produced it.
#[derive(Clone, Copy, Debug)]
pub struct AreaEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: AreaMethod,
    pub budget: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_rejects_bad_radius() {
        assert!(Disc::new(C64::new(0.0, 0.0), 0.0).is_err());
        assert!(Disc::new(C64::new(0.0, 0.0), -1.0).is_err());
        assert!(Disc::new(C64::new(0.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn half_disc_shares_center() {
        let d = Disc::new(C64::new(1.0, -2.0), 3.0).unwrap();
        let h = d.half();
        assert_eq!(h.center, d.center);
        assert_eq!(h.radius, 1.5);
    }
}
