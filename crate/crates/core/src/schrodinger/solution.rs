//! Positive solutions of `Δφ + qφ = 0` and the Beltrami coefficient of the
//! quasiregular map attached to an arbitrary solution.
//!
//! The positive solution is built by the Green-potential series: starting
//! from the constant one, each sweep applies the Green operator to `q`
//! times the previous term, and the partial sums converge geometrically as
//! long as one sweep contracts, which the [`EPSILON_0`] threshold
//! guarantees with a wide margin. Dividing any other solution `F` by `φ`
//! yields a function `u` whose gradient satisfies a divergence-form
//! identity, and the complex dilatation of `u + iv` (with `v` the conjugate
//! flux) has modulus `(1 - φ²)/(1 + φ²)` wherever `∇u` does not vanish.

use rayon::prelude::*;

use super::green::{
    equation_residual, radial_first_5, radial_second_5, theta_first, theta_second, GreenOperator,
};
use super::{PolarField, Potential, EPSILON_0};
use crate::error::{NodalError, Result};
use crate::C64;

/// Positive solution of `Δφ + qφ = 0`, normalised to maximum one.
#[derive(Debug, Clone)]
pub struct PositiveSolution {
    phi: PolarField,
    residual_norm: f64,
    iteration_count: usize,
    measured_gain: f64,
    measured_deficiency: f64,
}

impl PositiveSolution {
    pub fn phi(&self) -> &PolarField {
        &self.phi
    }

    pub fn min_value(&self) -> f64 {
        self.phi.values().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Max norm of `Δφ + qφ` on the measurement annulus.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn iteration_count(&self) -> usize {
        self.iteration_count
    }

    /// Largest observed `‖F_{i+1}‖ / (‖q‖ ‖F_i‖)`, the per-sweep gain of the
    /// Green operator on this potential. The iteration contracts whenever
    /// this times `‖q‖` stays below one.
    pub fn measured_gain(&self) -> f64 {
        self.measured_gain
    }

    /// `(1 - min φ) / ‖q‖`: how far the solution drops below one, per unit
    /// of potential norm.
    pub fn measured_deficiency(&self) -> f64 {
        self.measured_deficiency
    }
}

/// Builds the positive solution on the operator's grid.
pub fn positive_solution_on(op: &GreenOperator, q: &Potential) -> Result<PositiveSolution> {
    if q.sup_norm() >= EPSILON_0 {
        return Err(NodalError::Precondition(format!(
            "potential norm {} is not below the smallness threshold {}",
            q.sup_norm(),
            EPSILON_0
        )));
    }
    let grid = op.grid();
    let q_field = q.on_grid(grid);
    let mut term = PolarField::from_fn(grid, |_, _| 1.0);
    let mut psi = term.clone();
    let mut gain = 0.0f64;
    let mut iterations = 0;
    let mut converged = false;
    for i in 1..=200 {
        let previous_norm = term.sup_norm();
        term = op.potential(&q_field.product(&term));
        let norm = term.sup_norm();
        if q.sup_norm() > 0.0 && previous_norm > 0.0 {
            gain = gain.max(norm / (q.sup_norm() * previous_norm));
        }
        psi = psi.add(&term);
        iterations = i;
        if norm < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NodalError::NoConvergence {
            context: "positive solution series".into(),
            iterations,
        });
    }
    let sup_psi = psi.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(sup_psi > 0.0) {
        return Err(NodalError::Degenerate(
            "positive solution series lost positivity".into(),
        ));
    }
    let phi = psi.scaled(1.0 / sup_psi);
    let min_phi = phi.values().iter().cloned().fold(f64::INFINITY, f64::min);
    if min_phi <= 0.0 {
        return Err(NodalError::Degenerate(format!(
            "solution touched {min_phi} although the potential is admissible"
        )));
    }
    let residual_norm = equation_residual(&phi, &q_field.product(&phi));
    let measured_deficiency = if q.sup_norm() > 0.0 {
        (1.0 - min_phi) / q.sup_norm()
    } else {
        0.0
    };
    Ok(PositiveSolution {
        phi,
        residual_norm,
        iteration_count: iterations,
        measured_gain: gain,
        measured_deficiency,
    })
}

/// Convenience entry building a fresh Green operator for `grid`.
pub fn positive_solution(q: &Potential, grid: super::PolarGrid) -> Result<PositiveSolution> {
    positive_solution_on(&GreenOperator::new(grid), q)
}

/// Beltrami coefficient of `w = u + iv` for `u = F/φ`, on the rings where
/// the gradient of `u` is resolved.
#[derive(Debug, Clone)]
pub struct BeltramiField {
    grid: super::PolarGrid,
    mu: Vec<C64>,
    included: Vec<bool>,
    sup_mu: f64,
    dilation: f64,
}

impl BeltramiField {
    /// Coefficient at a node, `None` on the excluded critical set and on
    /// the centre and boundary rings where no gradient is formed.
    pub fn mu(&self, ring: usize, k: usize) -> Option<C64> {
        let idx = ring * self.grid.n_theta() + k;
        self.included[idx].then(|| self.mu[idx])
    }

    pub fn included_count(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }

    pub fn sup_mu(&self) -> f64 {
        self.sup_mu
    }

    /// Dilation bound `K = (1 + sup|μ|) / (1 - sup|μ|)`.
    pub fn dilation(&self) -> f64 {
        self.dilation
    }
}

/// Computes `μ = (1-φ²)/(1+φ²) · (u_x + i u_y)/(u_x - i u_y)` for `u = F/φ`.
///
/// Nodes where `|∇u|` falls below `1e-8` times its maximum are excluded:
/// critical points of `u` are isolated in theory but a grid needs a
/// concrete cutoff.
pub fn beltrami_field(f: &PolarField, sol: &PositiveSolution) -> Result<BeltramiField> {
    let grid = f.grid();
    assert_eq!(grid, sol.phi().grid(), "field and solution grids differ");
    let n = grid.n_theta();
    let phi = sol.phi();
    let u_values: Vec<f64> = f
        .values()
        .iter()
        .zip(phi.values())
        .map(|(a, b)| a / b)
        .collect();
    let u = PolarField::from_values(grid, u_values).expect("same layout");
    let ut = theta_first(&u);
    let h = grid.radial_step();

    let mut grad = vec![(0.0f64, 0.0f64); grid.rings() * n];
    let mut max_grad = 0.0f64;
    for i in 1..grid.n_rho() {
        let rho = grid.radius(i);
        for k in 0..n {
            let ur = (u.value(i + 1, k) - u.value(i - 1, k)) / (2.0 * h);
            let utk = ut[i * n + k] / rho;
            let theta = grid.angle(k);
            let ux = theta.cos() * ur - theta.sin() * utk;
            let uy = theta.sin() * ur + theta.cos() * utk;
            grad[i * n + k] = (ux, uy);
            max_grad = max_grad.max(ux.hypot(uy));
        }
    }
    if max_grad <= 0.0 {
        return Err(NodalError::Degenerate(
            "the reduced field is constant, no Beltrami coefficient exists".into(),
        ));
    }
    let threshold = 1e-8 * max_grad;

    let mut mu = vec![C64::new(0.0, 0.0); grid.rings() * n];
    let mut included = vec![false; grid.rings() * n];
    let mut sup_mu = 0.0f64;
    for i in 1..grid.n_rho() {
        for k in 0..n {
            let idx = i * n + k;
            let (ux, uy) = grad[idx];
            if ux.hypot(uy) <= threshold {
                continue;
            }
            let p = phi.value(i, k);
            let s = (1.0 - p * p) / (1.0 + p * p);
            mu[idx] = C64::new(ux, uy) / C64::new(ux, -uy) * s;
            included[idx] = true;
            sup_mu = sup_mu.max(s);
        }
    }
    if sup_mu >= 1.0 {
        return Err(NodalError::Degenerate(format!(
            "dilatation modulus reached {sup_mu}, the solution is not positive"
        )));
    }
    let dilation = (1.0 + sup_mu) / (1.0 - sup_mu);
    Ok(BeltramiField { grid, mu, included, sup_mu, dilation })
}

/// Max norm of the divergence-form identity `div(φ² ∇u) = 0` for `u = F/φ`,
/// expanded as `φ²Δu + 2φ(φ_ρ u_ρ + φ_θ u_θ / ρ²)` and measured on the
/// annulus `2h ≤ ρ ≤ 1 - 2h` with fourth-order radial stencils.
pub fn divergence_form_residual(f: &PolarField, sol: &PositiveSolution) -> f64 {
    let grid = f.grid();
    assert_eq!(grid, sol.phi().grid(), "field and solution grids differ");
    let n = grid.n_theta();
    let phi = sol.phi();
    let u_values: Vec<f64> = f
        .values()
        .iter()
        .zip(phi.values())
        .map(|(a, b)| a / b)
        .collect();
    let u = PolarField::from_values(grid, u_values).expect("same layout");
    let ut = theta_first(&u);
    let utt = theta_second(&u);
    let pt = theta_first(phi);

    (2..=grid.n_rho() - 2)
        .into_par_iter()
        .map(|i| {
            let rho = grid.radius(i);
            let mut worst = 0.0f64;
            for k in 0..n {
                let idx = i * n + k;
                let ur = radial_first_5(&u, i, k);
                let urr = radial_second_5(&u, i, k);
                let lap = urr + ur / rho + utt[idx] / (rho * rho);
                let p = phi.value(i, k);
                let pr = radial_first_5(phi, i, k);
                let cross = pr * ur + pt[idx] * ut[idx] / (rho * rho);
                worst = worst.max((p * p * lap + 2.0 * p * cross).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}
