//! Green potentials on the unit disc.
//!
//! The Dirichlet Green function of the disc, normalised so that `ΔF = -g`
//! for `F(z) = ∬ G(z,w) g(w) dA(w)`, is
//!
//! ```text
//! G(z,w) = (1/2π) log| (1 - z·conj(w)) / (z - w) |
//! ```
//!
//! and splits into angular modes: with `ρ_< = min(ρ,σ)`, `ρ_> = max(ρ,σ)`,
//!
//! ```text
//! 2π G = -log ρ_>  +  Σ_{m≥1} (1/m) [ (ρ_</ρ_>)^m - (ρσ)^m ] cos m(φ-ψ) .
//! ```
//!
//! The operator therefore acts mode by mode on the angular FFT of the data.
//! Each radial mode integral is evaluated in closed form against the local
//! cubic (4-point Lagrange) interpolant of the data, cell by cell, with the
//! evaluation radius always a cell boundary, so the kernel kink at `σ = ρ`
//! and the `log` singularity of the summed kernel never meet a quadrature
//! rule. All power integrals are arranged as ratios bounded by one, which
//! keeps the weights finite up to the Nyquist mode.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{PolarField, PolarGrid, Potential, EPSILON_0};
use crate::error::{NodalError, Result};
use crate::C64;

/// Discrete Green operator for one grid: per-mode weight matrices plus the
/// FFT plans that move fields in and out of mode space.
pub struct GreenOperator {
    grid: PolarGrid,
    /// `weights[m][i * rings + j]`: response of mode `m` at ring `i` to the
    /// interpolated data node at ring `j`, for `m = 0..=n_theta/2`.
    weights: Vec<Vec<f64>>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl GreenOperator {
    pub fn new(grid: PolarGrid) -> Self {
        let rings = grid.rings();
        let cells = cell_coefficients(grid);
        let weights: Vec<Vec<f64>> = (0..=grid.n_theta() / 2)
            .into_par_iter()
            .map(|m| mode_weights(grid, m, &cells))
            .collect();
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(grid.n_theta());
        let fft_inverse = planner.plan_fft_inverse(grid.n_theta());
        debug_assert_eq!(weights.len(), grid.n_theta() / 2 + 1);
        debug_assert!(weights.iter().all(|w| w.len() == rings * rings));
        Self { grid, weights, fft_forward, fft_inverse }
    }

    pub fn grid(&self) -> PolarGrid {
        self.grid
    }

    /// `F` with `ΔF = -g` and `F = 0` on the boundary circle.
    pub fn potential(&self, g: &PolarField) -> PolarField {
        assert_eq!(g.grid(), self.grid, "source lives on a different grid");
        let rings = self.grid.rings();
        let n = self.grid.n_theta();
        let modes = forward_modes(&self.fft_forward, g);

        // Mode-major matvecs against the cached weights.
        let mut out = vec![C64::new(0.0, 0.0); rings * n];
        let columns: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|mi| {
                let m = mi.min(n - mi);
                let w = &self.weights[m];
                let mut col = vec![C64::new(0.0, 0.0); rings];
                for (i, slot) in col.iter_mut().enumerate() {
                    let row = &w[i * rings..(i + 1) * rings];
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for (j, wij) in row.iter().enumerate() {
                        let c = modes[j * n + mi];
                        re += wij * c.re;
                        im += wij * c.im;
                    }
                    *slot = C64::new(re, im);
                }
                col
            })
            .collect();
        for (mi, col) in columns.iter().enumerate() {
            for i in 0..rings {
                out[i * n + mi] = col[i];
            }
        }

        let mut values = inverse_values(&self.fft_inverse, self.grid, &out);
        // The centre carries only the zeroth mode and the boundary is a
        // node of every mode integral; pin both exactly.
        let centre = out[0].re;
        for v in values[..n].iter_mut() {
            *v = centre;
        }
        for v in values[self.grid.n_rho() * n..].iter_mut() {
            *v = 0.0;
        }
        PolarField::from_values(self.grid, values).expect("layout is consistent")
    }
}

/// One-shot convenience around [`GreenOperator::potential`]. Building the
/// operator is the expensive part, so iterating callers should construct it
/// once and reuse it.
pub fn green_potential(g: &PolarField) -> PolarField {
    GreenOperator::new(g.grid()).potential(g)
}

/// Harmonic function matching the sampled boundary values: mode `m` of the
/// data is extended inwards as `ρ^|m|`.
pub fn harmonic_extension(boundary: &[f64], grid: PolarGrid) -> Result<PolarField> {
    if boundary.len() != grid.n_theta() {
        return Err(NodalError::Precondition(format!(
            "boundary data has {} samples, grid has {} angles",
            boundary.len(),
            grid.n_theta()
        )));
    }
    let n = grid.n_theta();
    let rings = grid.rings();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut hat: Vec<C64> = boundary.iter().map(|&v| C64::new(v, 0.0)).collect();
    forward.process(&mut hat);
    let scale = 1.0 / n as f64;
    for c in &mut hat {
        *c *= scale;
    }
    let mut modes = vec![C64::new(0.0, 0.0); rings * n];
    for i in 0..rings {
        let rho = grid.radius(i);
        for (mi, &c) in hat.iter().enumerate() {
            let m = mi.min(n - mi);
            modes[i * n + mi] = c * rho.powi(m as i32);
        }
    }
    let mut values = inverse_values(&inverse, grid, &modes);
    let centre = hat[0].re;
    for v in values[..n].iter_mut() {
        *v = centre;
    }
    // Ring n_rho is rho = 1 where every mode factor is exactly one.
    for (v, &b) in values[grid.n_rho() * n..].iter_mut().zip(boundary) {
        *v = b;
    }
    PolarField::from_values(grid, values)
}

/// Solves `ΔF + qF = 0` with prescribed boundary values by the contraction
/// `F ← P + G(qF)` where `P` is the harmonic extension of the data. Needs
/// `‖q‖` below [`EPSILON_0`] so one sweep shrinks the update.
pub fn solve_dirichlet(
    op: &GreenOperator,
    q: &Potential,
    boundary: &[f64],
) -> Result<PolarField> {
    if q.sup_norm() >= EPSILON_0 {
        return Err(NodalError::Precondition(format!(
            "potential norm {} is not below the contraction threshold {}",
            q.sup_norm(),
            EPSILON_0
        )));
    }
    let p = harmonic_extension(boundary, op.grid())?;
    let q_field = q.on_grid(op.grid());
    let tol = 1e-13 * (1.0 + p.sup_norm());
    let mut f = p.clone();
    for _ in 0..200 {
        let next = p.add(&op.potential(&q_field.product(&f)));
        let delta = next.sup_distance(&f);
        f = next;
        if delta < tol {
            return Ok(f);
        }
    }
    Err(NodalError::NoConvergence {
        context: "Dirichlet solve by Green-potential iteration".into(),
        iterations: 200,
    })
}

/// Max norm of `Δf + source` over the annulus `2h ≤ ρ ≤ 1 - 2h`.
///
/// Radial derivatives use fourth-order central stencils and the angular
/// second derivative is spectral, so the measured residual reflects the
/// field, not the differentiation. The two rings nearest the centre are
/// excluded: polar one-over-rho factors degrade finite differences there
/// regardless of how accurate the field is.
pub fn equation_residual(f: &PolarField, source: &PolarField) -> f64 {
    let grid = f.grid();
    assert_eq!(grid, source.grid(), "fields live on different grids");
    let n = grid.n_theta();
    let tt = theta_second(f);
    let mut worst = 0.0f64;
    for i in 2..=grid.n_rho() - 2 {
        let rho = grid.radius(i);
        for k in 0..n {
            let lap = radial_second_5(f, i, k)
                + radial_first_5(f, i, k) / rho
                + tt[i * n + k] / (rho * rho);
            worst = worst.max((lap + source.value(i, k)).abs());
        }
    }
    worst
}

/// Angular FFT of every ring, scaled to coefficient normalisation.
fn forward_modes(fft: &Arc<dyn Fft<f64>>, field: &PolarField) -> Vec<C64> {
    let grid = field.grid();
    let n = grid.n_theta();
    let scale = 1.0 / n as f64;
    let mut modes = vec![C64::new(0.0, 0.0); grid.rings() * n];
    for i in 0..grid.rings() {
        let row = &mut modes[i * n..(i + 1) * n];
        for (c, &v) in row.iter_mut().zip(field.ring(i)) {
            *c = C64::new(v * scale, 0.0);
        }
        fft.process(row);
    }
    modes
}

/// Inverse of [`forward_modes`]: reconstructs ring values, dropping the
/// rounding-level imaginary part of real data.
fn inverse_values(fft: &Arc<dyn Fft<f64>>, grid: PolarGrid, modes: &[C64]) -> Vec<f64> {
    let n = grid.n_theta();
    let mut values = vec![0.0; grid.rings() * n];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for i in 0..grid.rings() {
        buf.copy_from_slice(&modes[i * n..(i + 1) * n]);
        fft.process(&mut buf);
        for (v, c) in values[i * n..(i + 1) * n].iter_mut().zip(&buf) {
            *v = c.re;
        }
    }
    values
}

/// Spectral `∂²f/∂θ²` on every ring.
pub(crate) fn theta_second(field: &PolarField) -> Vec<f64> {
    theta_derivative(field, |m| (-(m * m), 0.0))
}

/// Spectral `∂f/∂θ` on every ring. The Nyquist mode gets a zero derivative,
/// the standard real-signal convention for odd derivatives.
pub(crate) fn theta_first(field: &PolarField) -> Vec<f64> {
    let n = field.grid().n_theta() as f64;
    theta_derivative(field, move |m| {
        if 2.0 * m == n {
            (0.0, 0.0)
        } else {
            (0.0, m)
        }
    })
}

fn theta_derivative(field: &PolarField, symbol: impl Fn(f64) -> (f64, f64)) -> Vec<f64> {
    let grid = field.grid();
    let n = grid.n_theta();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![0.0; grid.rings() * n];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let scale = 1.0 / n as f64;
    for i in 0..grid.rings() {
        for (c, &v) in buf.iter_mut().zip(field.ring(i)) {
            *c = C64::new(v * scale, 0.0);
        }
        forward.process(&mut buf);
        for (mi, c) in buf.iter_mut().enumerate() {
            let m = if mi <= n / 2 { mi as f64 } else { mi as f64 - n as f64 };
            let (re, im) = symbol(m);
            *c *= C64::new(re, im);
        }
        inverse.process(&mut buf);
        for (v, c) in out[i * n..(i + 1) * n].iter_mut().zip(&buf) {
            *v = c.re;
        }
    }
    out
}

/// Fourth-order radial second derivative at an interior ring.
pub(crate) fn radial_second_5(f: &PolarField, i: usize, k: usize) -> f64 {
    let h = f.grid().radial_step();
    (-f.value(i - 2, k) + 16.0 * f.value(i - 1, k) - 30.0 * f.value(i, k)
        + 16.0 * f.value(i + 1, k)
        - f.value(i + 2, k))
        / (12.0 * h * h)
}

/// Fourth-order radial first derivative at an interior ring.
pub(crate) fn radial_first_5(f: &PolarField, i: usize, k: usize) -> f64 {
    let h = f.grid().radial_step();
    (f.value(i - 2, k) - 8.0 * f.value(i - 1, k) + 8.0 * f.value(i + 1, k) - f.value(i + 2, k))
        / (12.0 * h)
}

/// Monomial coefficients of the four cubic Lagrange basis polynomials of
/// each radial cell. Cell `j` spans `[σ_j, σ_{j+1}]` and interpolates
/// through the four nearest rings, clamped at the ends of the radius.
struct CellBasis {
    /// First ring of the four-node window.
    start: usize,
    /// `coef[p][k]`: coefficient of `σ^k` in the basis polynomial of window
    /// node `p`.
    coef: [[f64; 4]; 4],
}

fn cell_coefficients(grid: PolarGrid) -> Vec<CellBasis> {
    let n = grid.n_rho();
    (0..n)
        .map(|j| {
            let start = j.saturating_sub(1).min(n - 3);
            let xs = [
                grid.radius(start),
                grid.radius(start + 1),
                grid.radius(start + 2),
                grid.radius(start + 3),
            ];
            let mut coef = [[0.0; 4]; 4];
            for p in 0..4 {
                // Expand prod_{q != p} (sigma - x_q) / (x_p - x_q).
                let mut num = [1.0, 0.0, 0.0, 0.0];
                let mut den = 1.0;
                for q in 0..4 {
                    if q == p {
                        continue;
                    }
                    den *= xs[p] - xs[q];
                    let mut next = [0.0; 4];
                    for (d, &c) in num.iter().enumerate().take(3) {
                        next[d + 1] += c;
                        next[d] -= xs[q] * c;
                    }
                    num = next;
                }
                for k in 0..4 {
                    coef[p][k] = num[k] / den;
                }
            }
            CellBasis { start, coef }
        })
        .collect()
}

/// Weight matrix of one angular mode: exact integrals of the mode kernel
/// against every cell's Lagrange basis.
fn mode_weights(grid: PolarGrid, m: usize, cells: &[CellBasis]) -> Vec<f64> {
    let rings = grid.rings();
    let mut w = vec![0.0; rings * rings];
    for i in 0..rings {
        let rho = grid.radius(i);
        if m >= 1 && i == 0 {
            continue; // every m >= 1 kernel vanishes at the centre
        }
        if i == grid.n_rho() {
            continue; // the potential vanishes on the boundary circle
        }
        let row = &mut w[i * rings..(i + 1) * rings];
        for (j, cell) in cells.iter().enumerate() {
            let a = grid.radius(j);
            let b = grid.radius(j + 1);
            let ints = if j + 1 <= i {
                kernel_integrals_below(m, rho, a, b)
            } else {
                kernel_integrals_above(m, rho, a, b)
            };
            for p in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += cell.coef[p][k] * ints[k];
                }
                row[cell.start + p] += acc;
            }
        }
    }
    w
}

/// `∫_a^b K_m(ρ,σ) σ^k dσ` for a cell below the evaluation radius
/// (`b ≤ ρ`), where `K_m` is the mode kernel including the area factor `σ`:
/// `K_0 = -σ log ρ` and `K_m = (σ/2m)[(σ/ρ)^m - (ρσ)^m]` here.
fn kernel_integrals_below(m: usize, rho: f64, a: f64, b: f64) -> [f64; 4] {
    let mut ints = [0.0; 4];
    if m == 0 {
        let factor = -rho.ln();
        for (k, slot) in ints.iter_mut().enumerate() {
            let e = k as i32 + 2;
            *slot = factor * (b.powi(e) - a.powi(e)) / e as f64;
        }
        return ints;
    }
    let xa = a / rho;
    let xb = b / rho;
    let rho_m = rho.powi(m as i32);
    for (k, slot) in ints.iter_mut().enumerate() {
        let e = (m + k + 2) as i32;
        let inner = rho.powi(k as i32 + 2) * (xb.powi(e) - xa.powi(e)) / e as f64;
        let outer = rho_m * (b.powi(e) - a.powi(e)) / e as f64;
        *slot = (inner - outer) / (2.0 * m as f64);
    }
    ints
}

/// Same integrals for a cell above the evaluation radius (`a ≥ ρ`):
/// `K_0 = -σ log σ` and `K_m = (σ/2m)[(ρ/σ)^m - (ρσ)^m]`.
fn kernel_integrals_above(m: usize, rho: f64, a: f64, b: f64) -> [f64; 4] {
    let mut ints = [0.0; 4];
    if m == 0 {
        // Antiderivative of -σ^{k+1} log σ, zero at σ = 0.
        let anti = |s: f64, e: f64| {
            if s == 0.0 {
                0.0
            } else {
                s.powf(e) * (1.0 / (e * e) - s.ln() / e)
            }
        };
        for (k, slot) in ints.iter_mut().enumerate() {
            let e = (k + 2) as f64;
            *slot = anti(b, e) - anti(a, e);
        }
        return ints;
    }
    let rho_m = rho.powi(m as i32);
    for (k, slot) in ints.iter_mut().enumerate() {
        let e_in = k as i32 + 2 - m as i32;
        let inner = if e_in == 0 {
            // a > 0 whenever this branch is reachable with m >= 1.
            rho_m * (b / a).ln()
        } else {
            let at = |s: f64| (rho / s).powi(m as i32) * s.powi(k as i32 + 2) / e_in as f64;
            at(b) - at(a)
        };
        let e_out = (m + k + 2) as i32;
        let outer = rho_m * (b.powi(e_out) - a.powi(e_out)) / e_out as f64;
        *slot = (inner - outer) / (2.0 * m as f64);
    }
    ints
}
