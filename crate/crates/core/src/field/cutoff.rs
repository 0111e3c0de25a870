//! Smooth plane cutoff used by the semi-strip construction.
//!
//! `chi(x + iy) = a(x) b(y)` is a tensor product of two C^2 quintic ramps:
//! it equals 1 on the inner region `{x >= 0, |y| <= 2pi/3}`, vanishes outside
//! `{x > -1, |y| < 4pi/3}`, and transitions monotonically in between. Its
//! Wirtinger derivative `dbar chi = (chi_x + i chi_y) / 2` is supported in the
//! transition bands and is available in closed form.

use crate::C64;
use std::f64::consts::PI;

/// Quintic smoothstep: 0 at 0, 1 at 1, with vanishing first and second
/// derivatives at both ends (so the assembled cutoff is C^2).
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

fn smoothstep_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (t - 1.0) * (t - 1.0)
    }
}

/// Geometry and closed-form derivatives of the cutoff.
#[derive(Clone, Debug)]
pub struct CutoffSpec {
    /// `a(x)` ramps from 0 to 1 on `(x_outer, x_inner)`.
    pub x_inner: f64,
    pub x_outer: f64,
    /// `b(y)` ramps from 1 to 0 on `(y_inner, y_outer)` in `|y|`.
    pub y_inner: f64,
    pub y_outer: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec {
            x_inner: 0.0,
            x_outer: -1.0,
            y_inner: 2.0 * PI / 3.0,
            y_outer: 4.0 * PI / 3.0,
        }
    }
}

impl CutoffSpec {
    fn a(&self, x: f64) -> f64 {
        smoothstep((x - self.x_outer) / (self.x_inner - self.x_outer))
    }

    fn a_prime(&self, x: f64) -> f64 {
        let w = self.x_inner - self.x_outer;
        smoothstep_prime((x - self.x_outer) / w) / w
    }

    fn b(&self, y: f64) -> f64 {
        smoothstep((self.y_outer - y.abs()) / (self.y_outer - self.y_inner))
    }

    fn b_prime(&self, y: f64) -> f64 {
        let w = self.y_outer - self.y_inner;
        -y.signum() * smoothstep_prime((self.y_outer - y.abs()) / w) / w
    }

    /// The cutoff value at `zeta`.
    pub fn chi(&self, zeta: C64) -> f64 {
        self.a(zeta.re) * self.b(zeta.im)
    }

    /// Closed-form Wirtinger derivative `(chi_x + i chi_y) / 2`.
    pub fn dbar_chi(&self, zeta: C64) -> C64 {
        let (x, y) = (zeta.re, zeta.im);
        C64::new(
            0.5 * self.a_prime(x) * self.b(y),
            0.5 * self.a(x) * self.b_prime(y),
        )
    }

    /// True where `dbar chi` can be non-zero (the transition bands).
    pub fn in_transition(&self, zeta: C64) -> bool {
        let (x, y) = (zeta.re, zeta.im);
        let x_band = x > self.x_outer && x < self.x_inner && y.abs() < self.y_outer;
        let y_band = y.abs() > self.y_inner && y.abs() < self.y_outer && x > self.x_outer;
        x_band || y_band
    }

    /// Analytic sup bound for `|dbar chi|`; the measured grid maximum must
    /// stay below this.
    pub fn declared_dbar_bound(&self) -> f64 {
        let max_ramp = 30.0 / 16.0; // smoothstep' at t = 1/2
        let ax = max_ramp / (self.x_inner - self.x_outer);
        let by = max_ramp / (self.y_outer - self.y_inner);
        0.5 * (ax * ax + by * by).sqrt()
    }
}
