//! Degree-`N` spherical harmonics on the round 2-sphere.
//!
//! Everything here lives in the `2N`-dimensional space of eigenfunctions for
//! the eigenvalue `N(N+1)` that vanish at the marked point `A = (0,0,1)`. On
//! the upper hemisphere, with chart coordinates `z = x1 + i x2` and
//! `r = |z|`, the space is spanned by
//!
//! ```text
//! e_j  = L_N^(j)(sqrt(1 - r^2)) z^j,        j = 1..N,
//! e_-j = conj(e_j),
//! ```
//!
//! where `L_N^(j)` is the j-th derivative of the degree-`N` Legendre
//! polynomial. Since `L_N^(j)` is itself a polynomial, evaluating it at the
//! signed height `x3` extends each `e_j` smoothly to the whole sphere; the
//! lower hemisphere picks up the parity `L_N^(j)(-x) = (-1)^(N-j)
//! L_N^(j)(x)`, and both one-sided limits agree on the equator.
//!
//! The submodules provide the basis itself, expansions with Gaussian random
//! coefficients, Laplace-Beltrami residuals on lat-long grids, and the
//! doubling / nodal-length statistics that tie local growth of an
//! eigenfunction to the length of its zero set.

mod basis;
mod expansion;
mod laplacian;
mod statistics;

pub use basis::{eval_basis, ln_basis_norm};
pub use expansion::SphericalHarmonicExpansion;
pub use laplacian::laplace_beltrami_residual;
pub use statistics::{
    doubling_statistics, nodal_length, nodal_length_vs_b1, signed_area_fractions,
    DoublingStatistics, NodalLengthReport, DEFAULT_DOUBLING_RADIUS_FACTOR,
};

use crate::{C64, NodalError, Result};

/// A point on the unit 2-sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    v: [f64; 3],
}

impl SpherePoint {
    /// Wraps a vector that is already unit length to within `1e-14`.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let norm = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-14 {
            return Err(NodalError::OutOfDomain {
                context: "sphere point norm",
                value: norm,
                limit: 1.0,
            });
        }
        Ok(SpherePoint { v: [x1, x2, x3] })
    }

    /// Projects an arbitrary nonzero vector onto the sphere.
    pub fn normalized(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let norm = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(NodalError::Degenerate(format!(
                "cannot project vector of norm {norm} onto the sphere"
            )));
        }
        Ok(SpherePoint {
            v: [x1 / norm, x2 / norm, x3 / norm],
        })
    }

    /// The marked point `A = (0, 0, 1)` every basis element vanishes at.
    pub fn north_pole() -> Self {
        SpherePoint { v: [0.0, 0.0, 1.0] }
    }

    /// Colatitude `theta` from the north pole and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SpherePoint {
            v: [st * cp, st * sp, ct],
        }
    }

    pub fn x1(&self) -> f64 {
        self.v[0]
    }

    pub fn x2(&self) -> f64 {
        self.v[1]
    }

    pub fn x3(&self) -> f64 {
        self.v[2]
    }

    /// Chart coordinate `z = x1 + i x2`.
    pub fn chart_z(&self) -> C64 {
        C64::new(self.v[0], self.v[1])
    }

    /// Chart radius `r = |z| = sin(colatitude)`.
    pub fn chart_r(&self) -> f64 {
        self.v[0].hypot(self.v[1])
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.v[0] * other.v[0] + self.v[1] * other.v[1] + self.v[2] * other.v[2]
    }

    /// Rotation by `phi` about the polar axis.
    pub fn rotated_about_pole(&self, phi: f64) -> SpherePoint {
        let (s, c) = phi.sin_cos();
        SpherePoint {
            v: [
                c * self.v[0] - s * self.v[1],
                s * self.v[0] + c * self.v[1],
                self.v[2],
            ],
        }
    }

    /// An orthonormal pair spanning the tangent plane at this point.
    fn tangent_frame(&self) -> ([f64; 3], [f64; 3]) {
        let [x, y, z] = self.v;
        // Cross with whichever axis is least aligned.
        let u = if z.abs() < 0.9 {
            let n = x.hypot(y);
            [-y / n, x / n, 0.0]
        } else {
            let n = x.hypot(z);
            [z / n, 0.0, -x / n]
        };
        let v = [
            y * u[2] - z * u[1],
            z * u[0] - x * u[2],
            x * u[1] - y * u[0],
        ];
        (u, v)
    }
}

/// A disc on the sphere described in the orthographic chart of its center:
/// tangent coordinates `w` with `|w| <= radius` map to
/// `sqrt(1 - |w|^2) center + w1 u + w2 v` for a tangent frame `(u, v)`.
///
/// The chart radius of a metric (geodesic) disc of radius `rho` is
/// `sin(rho)`; for the `1/sqrt(lambda)`-sized discs used in the statistics
/// the two differ only at third order.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicDisc {
    pub center: SpherePoint,
    /// Euclidean radius in the tangent chart, below 1.
    pub chart_radius: f64,
    frame: ([f64; 3], [f64; 3]),
}

impl GeodesicDisc {
    pub fn new(center: SpherePoint, chart_radius: f64) -> Result<Self> {
        if !(chart_radius > 0.0 && chart_radius < 1.0) {
            return Err(NodalError::OutOfDomain {
                context: "geodesic disc chart radius",
                value: chart_radius,
                limit: 1.0,
            });
        }
        Ok(GeodesicDisc {
            center,
            chart_radius,
            frame: center.tangent_frame(),
        })
    }

    /// Sphere point under the chart coordinate `w`, `|w| <= chart_radius`.
    pub fn chart_point(&self, w: C64) -> SpherePoint {
        let (u, v) = self.frame;
        let h = (1.0 - w.norm_sqr()).max(0.0).sqrt();
        let c = self.center.v;
        SpherePoint {
            v: [
                h * c[0] + w.re * u[0] + w.im * v[0],
                h * c[1] + w.re * u[1] + w.im * v[1],
                h * c[2] + w.re * u[2] + w.im * v[2],
            ],
        }
    }
}

/// Pole-free lat-long grid: colatitudes `theta_i = (i+1) pi / (rows+1)` and
/// longitudes `phi_k = 2 pi k / cols`. Values are stored row-major, one row
/// per colatitude.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl SphereGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 4 || cols < 4 {
            return Err(NodalError::Precondition(format!(
                "sphere grid {rows} x {cols} is too coarse"
            )));
        }
        let thetas = (0..rows)
            .map(|i| (i + 1) as f64 * std::f64::consts::PI / (rows + 1) as f64)
            .collect();
        let phis = (0..cols)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / cols as f64)
            .collect();
        Ok(SphereGrid { thetas, phis })
    }

    pub fn rows(&self) -> usize {
        self.thetas.len()
    }

    pub fn cols(&self) -> usize {
        self.phis.len()
    }

    /// Colatitude spacing; also the spacing from the poles to the first and
    /// last rows.
    pub fn theta_step(&self) -> f64 {
        std::f64::consts::PI / (self.rows() + 1) as f64
    }

    pub fn phi_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.cols() as f64
    }

    pub fn point(&self, row: usize, col: usize) -> SpherePoint {
        SpherePoint::from_spherical(self.thetas[row], self.phis[col])
    }

    /// Quadrature weight of the cell centered at `(row, col)`:
    /// `sin(theta) dtheta dphi`.
    pub fn cell_weight(&self, row: usize) -> f64 {
        self.thetas[row].sin() * self.theta_step() * self.phi_step()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_validation_and_projection() {
        assert!(SpherePoint::new(1.0, 0.0, 1e-6).is_err());
        let p = SpherePoint::normalized(3.0, 4.0, 12.0).unwrap();
        let n = (p.x1().powi(2) + p.x2().powi(2) + p.x3().powi(2)).sqrt();
        assert!((n - 1.0).abs() < 1e-15);
        assert!(SpherePoint::normalized(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        for p in [
            SpherePoint::north_pole(),
            SpherePoint::from_spherical(1.2, 0.4),
            SpherePoint::from_spherical(3.0, 5.9),
        ] {
            let (u, v) = p.tangent_frame();
            let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            assert!(dot(u, u).sqrt() - 1.0 < 1e-12);
            assert!(dot(v, v).sqrt() - 1.0 < 1e-12);
            assert!(dot(u, v).abs() < 1e-12);
            assert!(dot(u, p.v).abs() < 1e-12);
            assert!(dot(v, p.v).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_points_stay_on_the_sphere_and_center_maps_to_center() {
        let c = SpherePoint::from_spherical(0.9, 2.2);
        let disc = GeodesicDisc::new(c, 0.3).unwrap();
        assert_eq!(disc.chart_point(C64::new(0.0, 0.0)), c);
        for k in 0..12 {
            let w = C64::from_polar(0.29, 0.5 * k as f64);
            let p = disc.chart_point(w);
            let n = (p.x1().powi(2) + p.x2().powi(2) + p.x3().powi(2)).sqrt();
            assert!((n - 1.0).abs() < 1e-14);
            // Chart distance from the center equals |w| under orthographic
            // projection: the tangential component has length exactly |w|.
            let tangential = (1.0 - p.dot(&c).powi(2)).max(0.0).sqrt();
            assert!((tangential - w.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_radius_validation() {
        let c = SpherePoint::north_pole();
        assert!(GeodesicDisc::new(c, 1.0).is_err());
        assert!(GeodesicDisc::new(c, 0.0).is_err());
        assert!(GeodesicDisc::new(c, 0.5).is_ok());
    }

    #[test]
    fn grid_excludes_poles_and_weights_sum_to_sphere_area() {
        let g = SphereGrid::new(256, 512).unwrap();
        assert!(g.thetas[0] > 0.0);
        assert!(*g.thetas.last().unwrap() < std::f64::consts::PI);
        let total: f64 = (0..g.rows())
            .map(|i| g.cell_weight(i) * g.cols() as f64)
            .sum();
        // Midpoint-in-theta quadrature of sin over (0, pi) misses only the
        // pole caps, which shrink quadratically with the row count.
        assert!(
            (total - 4.0 * std::f64::consts::PI).abs() < 1e-3,
            "total {total}"
        );
    }

    #[test]
    fn polar_rotation_is_an_isometry_fixing_x3() {
        let p = SpherePoint::from_spherical(1.1, 0.7);
        let q = p.rotated_about_pole(0.9);
        assert!((q.x3() - p.x3()).abs() < 1e-15);
        assert!((q.chart_r() - p.chart_r()).abs() < 1e-15);
        assert!((q.chart_z().arg() - (p.chart_z().arg() + 0.9)).abs() < 1e-12);
    }
}
