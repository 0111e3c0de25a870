//! The entire function `E = chi * exp(exp z) - u` and its measured bounds.
//!
//! Outside the right half-strip where the cutoff is 1, the double-exponential
//! factor is tamed by the cutoff (its magnitude never exceeds `e` there) and
//! the potential is bounded, so `|E|` stays below a measured constant `c4`.
//! Everything downstream (shift, Cauchy radii) derives from that number.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::field::{double_exponential, CutoffSpec, ScaledComplex};
use crate::util::gauss_legendre;
use crate::{C64, Result};

use super::quadrature::DbarPotential;

/// `chi * exp(exp z) - u(z)`, with the magnitude tracked in log scale so the
/// plateau region (where the double exponential is astronomical) evaluates
/// without overflow.
pub struct EntireE {
    cutoff: CutoffSpec,
    potential: DbarPotential,
    /// Sup of `|u|` over the probe grid.
    u_sup: f64,
    /// Measured bound on `|E|` outside the right half-strip.
    c4: f64,
}

impl EntireE {
    pub fn new() -> Result<Self> {
        let cutoff = CutoffSpec::default();
        let potential = DbarPotential::new(cutoff.clone())?;

        // Probe |u| on a grid covering the bands and their surroundings.
        // The potential decays like 1/|z| far away, so the sup lives here.
        let rows: Vec<f64> = (0..40)
            .into_par_iter()
            .map(|i| {
                let mut row_max = 0.0f64;
                for j in 0..40 {
                    let z =
                        C64::new(-4.0 + 10.0 * i as f64 / 39.0, -6.0 + 12.0 * j as f64 / 39.0);
                    row_max = row_max.max(potential.eval(z).norm());
                }
                row_max
            })
            .collect();
        let u_sup = rows.into_iter().fold(0.0f64, f64::max);
        // Outside the half-strip, |chi * exp(exp z)| <= e (x < 0 keeps
        // e^x < 1; |y| > pi/2 makes the real part of e^z nonpositive where
        // chi is nonzero), so e + sup|u| bounds |E| there. The 5% margin
        // covers probe-grid gaps in the u sup.
        let c4 = 1.05 * u_sup + std::f64::consts::E;

        Ok(EntireE {
            cutoff,
            potential,
            u_sup,
            c4,
        })
    }

    pub fn c4(&self) -> f64 {
        self.c4
    }

    pub fn u_sup(&self) -> f64 {
        self.u_sup
    }

    pub fn potential(&self) -> &DbarPotential {
        &self.potential
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    /// Shift making `exp(exp R)` dominate `2 c4 + 1` with margin while
    /// keeping the function's scale modest. Any `R` with
    /// `exp(exp R) >= 2 c4 + 1` works for the sign argument; this one gives
    /// `exp(exp R) = (2 c4 + 2)^{e^{0.3}} ~ 2.7x` that threshold.
    pub fn shift(&self) -> f64 {
        ((2.0 * self.c4 + 2.0).ln().ln() + 0.3).max(1.0)
    }

    pub fn eval(&self, z: C64) -> ScaledComplex {
        let chi = self.cutoff.chi(z);
        let u = ScaledComplex::from_c64(self.potential.eval(z));
        if chi == 0.0 {
            return u.neg();
        }
        let mut head = double_exponential(z);
        head.log_magnitude += chi.ln();
        head.sub(u)
    }

    /// Contour integral of `E` around an axis-aligned rectangle (16-point
    /// Gauss per edge) together with a bound on the expected defect. For an
    /// entire function the true integral vanishes; numerically the cutoff
    /// part picks up the density integral over the enclosed region while the
    /// discrete potential contributes its enclosed node weights, so the
    /// residual is controlled by how well the node subset integrates the
    /// density, which is bounded by the boundary-crossing panel mass.
    pub fn morera_defect(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> (f64, f64) {
        let (gx, gw) = gauss_legendre(16);
        let corners = [
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
        ];
        let mut acc = C64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for k in 0..4 {
            let a = corners[k];
            let b = corners[(k + 1) % 4];
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (&g, &w) in gx.iter().zip(&gw) {
                let v = self.eval(mid + half * g).to_c64();
                scale = scale.max(v.norm());
                acc += v * half * w;
            }
        }
        // The enclosed-density integral and the enclosed node weights each
        // carry at most pi times the boundary-crossing panel mass, and the
        // residual is twice their difference.
        let tol = 4.0 * PI * self.potential.boundary_mass(x0, x1, y0, y1)
            + 1e-8 * (1.0 + scale);
        (acc.norm(), tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entire() -> EntireE {
        EntireE::new().unwrap()
    }

    #[test]
    fn bounded_left_of_the_cutoff() {
        let e = entire();
        let v = e.eval(C64::new(-2.0, 0.0)).to_c64().norm();
        assert!(v <= e.c4(), "|E(-2)| = {v}, c4 = {}", e.c4());
    }

    #[test]
    fn plateau_value_near_double_exponential() {
        let e = entire();
        let v = e.eval(C64::new(1.0, 0.0)).to_c64();
        let want = std::f64::consts::E.exp();
        assert!(
            (v.re - want).abs() <= e.c4() && v.im.abs() <= e.c4(),
            "E(1) = {v}, exp(exp 1) = {want}"
        );
    }

    #[test]
    fn probe_sup_outside_half_strip_below_c4() {
        // 2000 quasi-random points outside {x >= 0, |y| <= pi/2}.
        let e = entire();
        let mut max_seen = 0.0f64;
        let mut k = 0u32;
        let mut i = 0u32;
        while k < 2000 {
            i += 1;
            // Weyl sequence fills the rectangle evenly.
            let t1 = (i as f64 * 0.754877666246693).fract();
            let t2 = (i as f64 * 0.569840290998053).fract();
            let z = C64::new(-5.0 + 11.0 * t1, -6.0 + 12.0 * t2);
            if z.re >= 0.0 && z.im.abs() <= PI / 2.0 {
                continue;
            }
            k += 1;
            max_seen = max_seen.max(e.eval(z).to_c64().norm());
        }
        assert!(
            max_seen <= e.c4(),
            "probe sup {max_seen} exceeds c4 {}",
            e.c4()
        );
    }

    #[test]
    fn dichotomy_large_or_bounded() {
        // Every probe point has either |E| <= c4 or chi = 1 (where E tracks
        // the double exponential); the transition bands only ever lower the
        // magnitude.
        let e = entire();
        for i in 0..50 {
            for j in 0..40 {
                let z = C64::new(-4.0 + 9.0 * i as f64 / 49.0, -6.0 + 12.0 * j as f64 / 39.0);
                let v = e.eval(z);
                let bounded = v.log_magnitude <= e.c4().ln();
                let plateau = e.cutoff().chi(z) == 1.0;
                assert!(
                    bounded || plateau,
                    "z = {z}: |E| = e^{}, chi = {}",
                    v.log_magnitude,
                    e.cutoff().chi(z)
                );
            }
        }
    }

    #[test]
    fn morera_vanishes_in_holomorphic_region() {
        // Rectangle inside the plateau: no cutoff variation, no quadrature
        // nodes, so the contour integral is pure edge-rule error.
        let e = entire();
        let (defect, tol) = e.morera_defect(0.2, 0.9, -0.4, 0.4);
        assert!(defect <= tol, "defect {defect}, tol {tol}");
        assert!(tol < 1e-6, "tolerance unexpectedly loose: {tol}");
    }

    #[test]
    fn morera_controlled_across_band() {
        // Rectangle straddling the upper band; the defect is bounded by the
        // mass of boundary-crossing panels.
        let e = entire();
        let (defect, tol) = e.morera_defect(-0.3, 0.6, 1.9, 2.8);
        assert!(defect <= tol, "defect {defect}, tol {tol}");
    }

    #[test]
    fn shift_dominates_bound() {
        let e = entire();
        let r = e.shift();
        assert!(r >= 1.0);
        assert!(r.exp().exp() >= 2.0 * e.c4() + 1.0);
    }
}
