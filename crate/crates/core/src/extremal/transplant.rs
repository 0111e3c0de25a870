//! Transplanting the disc polynomial onto a tiny spherical cap.
//!
//! The degree-`N` polynomial `P(z) = sum alpha_j z^j` becomes a spherical
//! harmonic `f = sum beta_j L_N^(j)(x3) (x1 + i x2)^j` on a geodesic disc
//! about the north pole whose chart radius `delta_N` is chosen so the
//! harmonic deviates from the polynomial by at most half the tail budget.
//! The deviation per basis element is `(L_N^(j)(x3) / L_N^(j)(1) - 1)`,
//! controlled on the full chart range by a measured ratio bound; `beta_j`
//! rescales `alpha_j` by `L_N^(j)(1) delta^j`, which leaves the native range
//! almost immediately and lives in log scale.

use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::field::{LegendreTable, ScaledComplex};
use crate::metrics::{positivity_area, AreaEstimate, AreaMethod, Disc};
use crate::{C64, NodalError, Result};

use super::polynomial::{fmt17, ExtremalPolynomial, Provenance};

/// Radial knots for the basis-ratio bound.
const RATIO_GRID: usize = 200;

/// The transplanted pair: the spherical harmonic `f` on its cap and the
/// rescaled chart function `F(z) = f(delta_N z)` on the unit disc.
pub struct SphericalTransplant {
    pub degree: usize,
    /// Chart radius `delta_N` of the cap.
    pub chart_radius: f64,
    pub kappa: f64,
    /// `max_j max_r |(L_N^(j)(sqrt(1 - r^2)) / L_N^(j)(1) - 1) / r|`.
    pub max_basis_ratio: f64,
    /// `sum_j |alpha_j|`.
    pub alpha_sum: f64,
    /// `max_basis_ratio * alpha_sum`; the chart radius is `kappa / (2 M)`.
    pub m_n: f64,
    /// Certified sup bound on `|F - P|` over the cap: `delta_N * m_n`.
    pub transplant_bound: f64,
    /// Sup of the chart area Jacobian `1 / sqrt(1 - rho^2)` over the cap.
    pub chart_jacobian_sup: f64,
    /// Disc coefficients of the source polynomial.
    alpha: Vec<C64>,
    /// `beta_j = alpha_j / (L_N^(j)(1) delta^j)`, log scale.
    beta: Vec<ScaledComplex>,
    /// `ln L_N^(j)(1)`.
    ln_a: Vec<f64>,
    /// `alpha_j * A_{j+1} / A_j`, the first-order chart correction.
    correction: Vec<C64>,
    /// Bound on the quadratic remainder the two-term evaluation drops; when
    /// it is not negligible the evaluator falls back to exact columns.
    remainder_bound: f64,
    table: LegendreTable,
    /// `r_N` of the source polynomial, carried for provenance.
    pub scale_radius: f64,
    pub provenance: Provenance,
}

impl SphericalTransplant {
    pub fn new(poly: &ExtremalPolynomial) -> Result<Self> {
        let n = poly.degree;
        let table = LegendreTable::new(n);
        let ln_a: Vec<f64> = (0..=n).map(|j| table.ln_at_one(j)).collect();

        // Ratio bound over the whole chart range r in (0, 1]. The ratios
        // L^(j)(x)/L^(j)(1) live in [-1, 1], so the arithmetic is native.
        let maxima: Vec<f64> = (1..=RATIO_GRID)
            .into_par_iter()
            .map(|k| {
                let r = k as f64 / RATIO_GRID as f64;
                let x = (1.0 - r * r).max(0.0).sqrt();
                let cols = table.derivative_columns_signed(x);
                let mut worst = 0.0f64;
                for (j, col) in cols.iter().enumerate() {
                    let ratio = col.sign as f64 * (col.ln_abs - ln_a[j]).exp();
                    worst = worst.max((ratio - 1.0).abs() / r);
                }
                worst
            })
            .collect();
        let max_basis_ratio = maxima.into_iter().fold(0.0f64, f64::max);

        let alpha = poly.coefficients.clone();
        let alpha_sum: f64 = alpha.iter().map(|c| c.norm()).sum();
        let m_n = max_basis_ratio * alpha_sum;
        if !(m_n.is_finite() && m_n > 0.0) {
            return Err(NodalError::Degenerate(format!(
                "basis ratio bound M = {m_n}; cannot size the cap"
            )));
        }
        // In log space first: delta itself is minuscule but never underflows
        // for any degree this pipeline produces.
        let ln_delta = (poly.kappa / 2.0).ln() - m_n.ln();
        let chart_radius = ln_delta.exp();

        let beta: Vec<ScaledComplex> = alpha
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let a = ScaledComplex::from_c64(*c);
                ScaledComplex::new(
                    a.log_magnitude - ln_a[j] - j as f64 * ln_delta,
                    a.phase,
                )
            })
            .collect();

        // On the cap, `x3 = sqrt(1 - rho^2)` sits within `delta^2` of 1,
        // far above the largest zero of any derivative of L_N, so every
        // L_N^(k) is positive and increasing there and a two-term Taylor
        // expansion of the ratio L^(j)(x3)/A_j about 1 has remainder at most
        // `(1 - x3)^2 / 2 * A_{j+2} / A_j` per basis element. The correction
        // coefficients fold the linear term into a second polynomial so the
        // chart evaluation is two Horner passes instead of a fresh Legendre
        // column per point.
        let correction: Vec<C64> = alpha
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j + 1 > n {
                    C64::new(0.0, 0.0)
                } else {
                    *c * (ln_a[j + 1] - ln_a[j]).exp()
                }
            })
            .collect();
        let u_max = {
            let d2 = chart_radius * chart_radius;
            d2 / (1.0 + (1.0 - d2).max(0.0).sqrt())
        };
        let positive_zone = u_max < 1.0 / (8.0 * (n * n) as f64);
        let remainder_bound = if positive_zone && n >= 2 {
            let step2 = (0..=n - 2)
                .map(|j| (ln_a[j + 2] - ln_a[j]).exp())
                .fold(0.0f64, f64::max);
            0.5 * u_max * u_max * step2 * alpha_sum
        } else if positive_zone {
            0.0
        } else {
            f64::INFINITY
        };

        Ok(SphericalTransplant {
            degree: n,
            chart_radius,
            kappa: poly.kappa,
            max_basis_ratio,
            alpha_sum,
            m_n,
            transplant_bound: chart_radius * m_n,
            chart_jacobian_sup: 1.0 / (1.0 - chart_radius * chart_radius).sqrt(),
            alpha,
            beta,
            ln_a,
            correction,
            remainder_bound,
            table,
            scale_radius: poly.scale_radius,
            provenance: poly.provenance.clone(),
        })
    }

    /// `F(z) = f(delta_N z)` on the closed unit disc, through the
    /// polynomial-coefficient route: `P(z) - (1 - x3) D(z)` where `D` holds
    /// the first-order Legendre-ratio corrections, plus a remainder below
    /// `remainder_bound`. Falls back to exact ratio columns when that bound
    /// is not vanishingly small.
    pub fn eval_rescaled(&self, z: C64) -> C64 {
        if self.remainder_bound > 1e-10 {
            return self.eval_exact_columns(z);
        }
        let rho = self.chart_radius * z.norm();
        let rho2 = rho * rho;
        let u = rho2 / (1.0 + (1.0 - rho2).max(0.0).sqrt());
        let mut p = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for j in (0..self.alpha.len()).rev() {
            p = p * z + self.alpha[j];
            d = d * z + self.correction[j];
        }
        p - d * u
    }

    /// Reference chart evaluation with per-point Legendre ratio columns.
    fn eval_exact_columns(&self, z: C64) -> C64 {
        let rho = self.chart_radius * z.norm();
        let x3 = (1.0 - rho * rho).max(0.0).sqrt();
        let cols = self.table.derivative_columns_signed(x3);
        let mut acc = C64::new(0.0, 0.0);
        let mut zp = C64::new(1.0, 0.0);
        for (j, &c) in self.alpha.iter().enumerate() {
            let ratio = cols[j].sign as f64 * (cols[j].ln_abs - self.ln_a[j]).exp();
            acc += c * zp * ratio;
            zp *= z;
        }
        acc
    }

    /// The harmonic `f` at chart polar coordinates `(rho, theta)`,
    /// `rho <= delta_N`.
    pub fn eval_chart(&self, rho: f64, theta: f64) -> Result<C64> {
        if !(rho >= 0.0) || rho > self.chart_radius * (1.0 + 1e-12) {
            return Err(NodalError::OutOfDomain {
                context: "transplant chart radius",
                value: rho,
                limit: self.chart_radius,
            });
        }
        let t = rho / self.chart_radius;
        Ok(self.eval_rescaled(C64::new(t * theta.cos(), t * theta.sin())))
    }

    /// Same value through the spherical-basis route: `sum beta_j L_N^(j)(x3)
    /// rho^j e^{i j theta}`, every factor in log scale. Exercises the `beta`
    /// bookkeeping end to end; quadratically slower than the alpha route.
    pub fn eval_basis_route(&self, z: C64) -> C64 {
        let rho = self.chart_radius * z.norm();
        let theta = if z.norm() == 0.0 { 0.0 } else { z.arg() };
        let x3 = (1.0 - rho * rho).max(0.0).sqrt();
        let cols = self.table.derivative_columns_signed(x3);
        let ln_rho = rho.ln();
        let mut acc = ScaledComplex::ZERO;
        for (j, b) in self.beta.iter().enumerate() {
            if b.is_zero() || cols[j].is_zero() {
                continue;
            }
            if j > 0 && rho == 0.0 {
                continue;
            }
            let term = ScaledComplex::new(
                b.log_magnitude + cols[j].ln_abs + j as f64 * ln_rho,
                b.phase + j as f64 * theta + if cols[j].sign < 0 { PI } else { 0.0 },
            );
            acc = acc.add(term);
        }
        acc.to_c64()
    }

    /// Positivity area of `Re f` on the cap, as a fraction of the cap's
    /// spherical area. The chart Jacobian is within `chart_jacobian_sup` of
    /// 1, so the Euclidean chart ratio carries over with that factor.
    pub fn sphere_positivity(
        &self,
        budget: usize,
        method: AreaMethod,
    ) -> Result<TransplantArea> {
        let estimate = positivity_area(
            |z| self.eval_rescaled(z).re,
            &Disc::unit(),
            budget,
            method,
        )?;
        Ok(TransplantArea {
            ratio: estimate.value / PI,
            jacobian_sup: self.chart_jacobian_sup,
            estimate,
        })
    }

    /// Finite-difference residual of the eigen-equation on the cap, in the
    /// rescaled chart variable `z = w / delta_N`.
    ///
    /// With `s = |z|` and `rho = delta_N s`, the round-metric Laplacian in the
    /// orthographic chart reads
    ///
    /// ```text
    /// Delta f = (1 - rho^2) f_rr + ((1 - rho^2)/rho - rho) f_r + f_tt / rho^2,
    /// ```
    ///
    /// so multiplying the eigen-equation by `delta_N^2` gives the rescaled form
    ///
    /// ```text
    /// (1 - d^2 s^2) f_ss + ((1 - d^2 s^2)/s - d^2 s) f_s + f_tt / s^2
    ///     + d^2 N(N+1) f  =  0,   d = delta_N,
    /// ```
    ///
    /// which is evaluated by second-order central differences on an
    /// `n_rho x n_theta` polar grid over `Re f`. The cap is the only region
    /// where the harmonic is representable in native floats (away from it the
    /// coefficients' `delta^{-j}` factors take over), and it is the region the
    /// area statements live on. Returns `max |residual| / max |f|` over rings
    /// `2 ..= n_rho - 1`; the two innermost rings are excluded for the usual
    /// polar-stencil pathology at the coordinate center.
    pub fn chart_eigen_residual(&self, n_rho: usize, n_theta: usize) -> Result<f64> {
        if n_rho < 8 || n_theta < 8 {
            return Err(NodalError::Precondition(format!(
                "chart residual grid {n_rho} x {n_theta} is below the 8 x 8 minimum"
            )));
        }
        let values: Vec<f64> = (0..=n_rho)
            .into_par_iter()
            .flat_map_iter(|i| {
                let s = i as f64 / n_rho as f64;
                (0..n_theta).map(move |k| {
                    let theta = 2.0 * PI * k as f64 / n_theta as f64;
                    (s, theta)
                })
            })
            .map(|(s, theta)| {
                self.eval_rescaled(C64::new(s * theta.cos(), s * theta.sin()))
                    .re
            })
            .collect();

        let h = 1.0 / n_rho as f64;
        let h_t = 2.0 * PI / n_theta as f64;
        let d2 = self.chart_radius * self.chart_radius;
        let lambda = (self.degree * (self.degree + 1)) as f64;
        let per_ring: Vec<(f64, f64)> = (2..n_rho)
            .into_par_iter()
            .map(|i| {
                let s = i as f64 * h;
                let metric = 1.0 - d2 * s * s;
                let mut max_res = 0.0f64;
                let mut max_val = 0.0f64;
                for k in 0..n_theta {
                    let f = values[i * n_theta + k];
                    let inner = values[(i - 1) * n_theta + k];
                    let outer = values[(i + 1) * n_theta + k];
                    let left = values[i * n_theta + (k + n_theta - 1) % n_theta];
                    let right = values[i * n_theta + (k + 1) % n_theta];
                    let f_ss = (outer - 2.0 * f + inner) / (h * h);
                    let f_s = (outer - inner) / (2.0 * h);
                    let f_tt = (right - 2.0 * f + left) / (h_t * h_t);
                    let res = metric * f_ss + (metric / s - d2 * s) * f_s + f_tt / (s * s)
                        + d2 * lambda * f;
                    max_res = max_res.max(res.abs());
                    max_val = max_val.max(f.abs());
                }
                (max_res, max_val)
            })
            .collect();
        let (max_res, max_val) = per_ring
            .into_iter()
            .fold((0.0f64, 0.0f64), |(r, v), (pr, pv)| (r.max(pr), v.max(pv)));
        if max_val == 0.0 {
            return Ok(0.0);
        }
        Ok(max_res / max_val)
    }

    /// Versioned JSON artifact; floats as 17-significant-digit strings.
    pub fn to_json(&self) -> Value {
        json!({
            "format": "spherical-transplant",
            "version": 1,
            "degree": self.degree,
            "chart_radius": fmt17(self.chart_radius),
            "kappa": fmt17(self.kappa),
            "max_basis_ratio": fmt17(self.max_basis_ratio),
            "alpha_sum": fmt17(self.alpha_sum),
            "m_n": fmt17(self.m_n),
            "transplant_bound": fmt17(self.transplant_bound),
            "chart_jacobian_sup": fmt17(self.chart_jacobian_sup),
            "scale_radius": fmt17(self.scale_radius),
            "alpha": self
                .alpha
                .iter()
                .map(|c| json!([fmt17(c.re), fmt17(c.im)]))
                .collect::<Vec<_>>(),
            "beta_log": self
                .beta
                .iter()
                .map(|b| json!([fmt17(b.log_magnitude), fmt17(b.phase)]))
                .collect::<Vec<_>>(),
            "provenance": {
                "c4_measured": fmt17(self.provenance.c4),
                "shift": fmt17(self.provenance.shift),
                "c5_eff": fmt17(self.provenance.c5_eff),
                "c6_eff": fmt17(self.provenance.c6_eff),
                "quadrature": self.provenance.quadrature,
            },
        })
    }
}

/// Spherical positivity-area measurement on the cap.
pub struct TransplantArea {
    pub estimate: AreaEstimate,
    /// Euclidean chart positivity fraction; the spherical fraction differs
    /// by at most the Jacobian spread.
    pub ratio: f64,
    pub jacobian_sup: f64,
}
