//! Schrödinger fields `ΔF + qF = 0` on the unit disc with a bounded potential.
//!
//! Everything lives on a fixed polar product grid. Green potentials against
//! the disc Green function are computed by integrating each angular mode of
//! the kernel exactly against a piecewise-cubic radial interpolant of the
//! data, so the kernel singularity never meets a quadrature rule; the only
//! discretisation errors are radial interpolation and the angular band limit
//! of the data. On top of the Green operator sit the positive solution of
//! the equation for small `q`, the Beltrami coefficient of the associated
//! quasiregular map, the frequency integral `J(r)` with its log-convexity
//! check, three-circle ratios, and a convexity certificate for the abstract
//! ODE `ḧ = L(t)h` that drives all of them.

mod frequency;
mod green;
mod ode;
mod solution;

pub use frequency::{
    elliptic_sandwich_check, frequency_j, frequency_profile, log_convexity_check, max_in_disc,
    three_circles_check, EllipticSandwich, FrequencyProfile, ThreeCirclesCheck,
};
pub use green::{
    equation_residual, green_potential, harmonic_extension, solve_dirichlet, GreenOperator,
};
pub use ode::{ode_convexity_violation, toy_ode_convexity};
pub use solution::{
    beltrami_field, divergence_form_residual, positive_solution, positive_solution_on,
    BeltramiField, PositiveSolution,
};

use crate::error::{NodalError, Result};
use crate::util::task_rng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Smallness threshold for potentials fed to the positive-solution
/// iteration. The contraction factor of one Green-potential sweep is about
/// `‖q‖/4`, so anything below this bound converges with a wide margin.
pub const EPSILON_0: f64 = 0.1;

/// Polar product grid on the closed unit disc.
///
/// Rings sit at `ρ_i = i/n_rho` for `i = 0..=n_rho` (the centre and the
/// boundary circle are both rings) and angles at `θ_k = 2πk/n_theta`. Ring 0
/// stores the centre value duplicated across all angles so that fields keep
/// a rectangular layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarGrid {
    n_rho: usize,
    n_theta: usize,
}

impl PolarGrid {
    pub fn new(n_rho: usize, n_theta: usize) -> Result<Self> {
        if n_rho < 8 || n_theta < 8 {
            return Err(NodalError::Precondition(format!(
                "polar grid needs at least 8 rings and 8 angles, got {n_rho} x {n_theta}"
            )));
        }
        if n_theta % 2 != 0 {
            return Err(NodalError::Precondition(format!(
                "angular resolution must be even for the modal transforms, got {n_theta}"
            )));
        }
        Ok(Self { n_rho, n_theta })
    }

    /// 128 rings by 256 angles, the resolution the residual tolerances in
    /// this module are quoted at.
    pub fn default_resolution() -> Self {
        Self { n_rho: 128, n_theta: 256 }
    }

    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Number of stored rings, `n_rho + 1`.
    pub fn rings(&self) -> usize {
        self.n_rho + 1
    }

    pub fn radius(&self, ring: usize) -> f64 {
        ring as f64 / self.n_rho as f64
    }

    pub fn angle(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.n_theta as f64
    }

    pub fn radial_step(&self) -> f64 {
        1.0 / self.n_rho as f64
    }

    fn node(&self, ring: usize, k: usize) -> usize {
        ring * self.n_theta + k
    }
}

/// Real scalar field sampled on a [`PolarGrid`].
#[derive(Debug, Clone)]
pub struct PolarField {
    grid: PolarGrid,
    values: Vec<f64>,
}

impl PolarField {
    pub fn zeros(grid: PolarGrid) -> Self {
        Self { grid, values: vec![0.0; grid.rings() * grid.n_theta()] }
    }

    /// Samples `f(ρ, θ)` at every node. The evaluator must be single-valued
    /// at the centre, where every angle refers to the same point.
    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.rings() * grid.n_theta());
        for i in 0..grid.rings() {
            let rho = grid.radius(i);
            for k in 0..grid.n_theta() {
                values.push(f(rho, grid.angle(k)));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.rings() * grid.n_theta() {
            return Err(NodalError::Precondition(format!(
                "field needs {} values for a {} x {} grid, got {}",
                grid.rings() * grid.n_theta(),
                grid.n_rho(),
                grid.n_theta(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> PolarGrid {
        self.grid
    }

    pub fn value(&self, ring: usize, k: usize) -> f64 {
        self.values[self.grid.node(ring, k)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn ring(&self, i: usize) -> &[f64] {
        let n = self.grid.n_theta();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise product, used to form `q · F` source terms.
    pub fn product(&self, other: &PolarField) -> PolarField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        PolarField { grid: self.grid, values }
    }

    pub fn scaled(&self, factor: f64) -> PolarField {
        PolarField {
            grid: self.grid,
            values: self.values.iter().map(|v| factor * v).collect(),
        }
    }

    pub fn add(&self, other: &PolarField) -> PolarField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        PolarField { grid: self.grid, values }
    }

    pub fn sup_distance(&self, other: &PolarField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Bilinear interpolation in `(ρ, θ)`, used when a field serves as an
    /// ingested potential on a grid other than its own.
    pub fn sample(&self, rho: f64, theta: f64) -> f64 {
        let nr = self.grid.n_rho() as f64;
        let x = (rho.clamp(0.0, 1.0)) * nr;
        let i = (x.floor() as usize).min(self.grid.n_rho() - 1);
        let fx = x - i as f64;
        let nt = self.grid.n_theta() as f64;
        let tau = theta.rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
        let y = tau * nt;
        let k = (y.floor() as usize).min(self.grid.n_theta() - 1);
        let fy = y - k as f64;
        let k1 = (k + 1) % self.grid.n_theta();
        let a = self.value(i, k) * (1.0 - fy) + self.value(i, k1) * fy;
        let b = self.value(i + 1, k) * (1.0 - fy) + self.value(i + 1, k1) * fy;
        a * (1.0 - fx) + b * fx
    }
}

const SCAN_RINGS: usize = 256;
const SCAN_ANGLES: usize = 256;

#[derive(Debug, Clone)]
enum PotentialKind {
    Constant(f64),
    GaussianBump { amplitude: f64, width: f64 },
    TrigPolynomial { terms: Vec<TrigTerm> },
    Grid(PolarField),
}

/// One term `Re(c z^m) |z|^{2k}` of a smooth polynomial potential.
#[derive(Debug, Clone, Copy)]
struct TrigTerm {
    angular: u32,
    radial_extra: u32,
    re: f64,
    im: f64,
}

impl TrigTerm {
    fn eval(&self, rho: f64, theta: f64) -> f64 {
        let p = rho.powi((self.angular + 2 * self.radial_extra) as i32);
        let a = self.angular as f64 * theta;
        p * (self.re * a.cos() - self.im * a.sin())
    }

    fn radial_derivative(&self, rho: f64, theta: f64) -> f64 {
        let power = self.angular + 2 * self.radial_extra;
        if power == 0 {
            return 0.0;
        }
        let p = power as f64 * rho.powi(power as i32 - 1);
        let a = self.angular as f64 * theta;
        p * (self.re * a.cos() - self.im * a.sin())
    }
}

/// Bounded potential `q` on the closed unit disc.
///
/// Carries its uniform norm and the growth bound `sup(|q| + ρ|q_ρ|)` that
/// the frequency integral turns into the cosh rate `γ`. Both are measured
/// on a dense scan at construction, except where a closed form is exact.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    sup_norm: f64,
    radial_bound: f64,
}

impl Potential {
    pub fn constant(value: f64) -> Self {
        Self {
            kind: PotentialKind::Constant(value),
            sup_norm: value.abs(),
            radial_bound: value.abs(),
        }
    }

    /// Radial bump `amplitude · exp(−(ρ/width)²)`.
    pub fn gaussian_bump(amplitude: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !amplitude.is_finite() {
            return Err(NodalError::Precondition(format!(
                "gaussian bump needs finite amplitude and positive width, got {amplitude}, {width}"
            )));
        }
        let kind = PotentialKind::GaussianBump { amplitude, width };
        Ok(Self::measured(kind))
    }

    /// Seeded smooth polynomial potential scaled so that `‖q‖ = target_sup`.
    ///
    /// Terms are `Re(c_{mk} z^m) |z|^{2k}` for `m ≤ 3`, `k ≤ 1` with
    /// standard normal coefficients from the task RNG substream of `seed`.
    pub fn seeded_trig(seed: u64, target_sup: f64) -> Result<Self> {
        if !(target_sup > 0.0) {
            return Err(NodalError::Precondition(format!(
                "seeded potential needs a positive target norm, got {target_sup}"
            )));
        }
        let mut rng = task_rng(seed, 0);
        let mut terms = Vec::new();
        for m in 0..=3u32 {
            for k in 0..=1u32 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if m == 0 { 0.0 } else { rng.sample(StandardNormal) };
                terms.push(TrigTerm { angular: m, radial_extra: k, re, im });
            }
        }
        let raw = Self::measured(PotentialKind::TrigPolynomial { terms: terms.clone() });
        if raw.sup_norm == 0.0 {
            return Err(NodalError::Degenerate(
                "seeded potential vanished identically".into(),
            ));
        }
        let scale = target_sup / raw.sup_norm;
        for t in &mut terms {
            t.re *= scale;
            t.im *= scale;
        }
        Ok(Self::measured(PotentialKind::TrigPolynomial { terms }))
    }

    /// Potential given by grid samples, evaluated in between by bilinear
    /// interpolation.
    pub fn from_grid(values: PolarField) -> Self {
        Self::measured(PotentialKind::Grid(values))
    }

    /// Parses the grid CSV format: a header line `n_rho,n_theta` followed by
    /// `n_rho + 1` lines of `n_theta` comma-separated values each, rings
    /// listed from the centre outwards.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| NodalError::Format("empty potential CSV".into()))?;
        let dims: Vec<&str> = header.split(',').map(str::trim).collect();
        if dims.len() != 2 {
            return Err(NodalError::Format(format!(
                "potential CSV header must be 'n_rho,n_theta', got '{header}'"
            )));
        }
        let n_rho: usize = dims[0]
            .parse()
            .map_err(|_| NodalError::Format(format!("bad n_rho '{}'", dims[0])))?;
        let n_theta: usize = dims[1]
            .parse()
            .map_err(|_| NodalError::Format(format!("bad n_theta '{}'", dims[1])))?;
        let grid = PolarGrid::new(n_rho, n_theta)?;
        let mut values = Vec::with_capacity(grid.rings() * n_theta);
        for (row, line) in lines.enumerate() {
            if row >= grid.rings() {
                return Err(NodalError::Format(format!(
                    "potential CSV has more than {} data rows",
                    grid.rings()
                )));
            }
            for cell in line.split(',') {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    NodalError::Format(format!("bad value '{}' in row {row}", cell.trim()))
                })?;
                values.push(v);
            }
            if values.len() != (row + 1) * n_theta {
                return Err(NodalError::Format(format!(
                    "row {row} has {} values, expected {n_theta}",
                    values.len() as i64 - (row * n_theta) as i64
                )));
            }
        }
        let field = PolarField::from_values(grid, values).map_err(|_| {
            NodalError::Format("potential CSV is missing data rows".into())
        })?;
        Ok(Self::from_grid(field))
    }

    fn measured(kind: PotentialKind) -> Self {
        let mut sup = 0.0f64;
        let mut bound = 0.0f64;
        match &kind {
            PotentialKind::Constant(c) => {
                sup = c.abs();
                bound = c.abs();
            }
            PotentialKind::GaussianBump { amplitude, width } => {
                for i in 0..=4096 {
                    let rho = i as f64 / 4096.0;
                    let x = rho / width;
                    let q = amplitude * (-x * x).exp();
                    let qr = -2.0 * rho / (width * width) * q;
                    sup = sup.max(q.abs());
                    bound = bound.max(q.abs() + rho * qr.abs());
                }
            }
            PotentialKind::TrigPolynomial { terms } => {
                for i in 0..=SCAN_RINGS {
                    let rho = i as f64 / SCAN_RINGS as f64;
                    for k in 0..SCAN_ANGLES {
                        let theta = 2.0 * std::f64::consts::PI * k as f64 / SCAN_ANGLES as f64;
                        let q: f64 = terms.iter().map(|t| t.eval(rho, theta)).sum();
                        let qr: f64 =
                            terms.iter().map(|t| t.radial_derivative(rho, theta)).sum();
                        sup = sup.max(q.abs());
                        bound = bound.max(q.abs() + rho * qr.abs());
                    }
                }
            }
            PotentialKind::Grid(field) => {
                let g = field.grid();
                let h = g.radial_step();
                for i in 0..g.rings() {
                    for k in 0..g.n_theta() {
                        let q = field.value(i, k);
                        let qr = if i == 0 || i == g.n_rho() {
                            // One-sided difference at the ends of the radius.
                            let (a, b) = if i == 0 { (0, 1) } else { (i - 1, i) };
                            (field.value(b, k) - field.value(a, k)) / h
                        } else {
                            (field.value(i + 1, k) - field.value(i - 1, k)) / (2.0 * h)
                        };
                        sup = sup.max(q.abs());
                        bound = bound.max(q.abs() + g.radius(i) * qr.abs());
                    }
                }
            }
        }
        Self { kind, sup_norm: sup, radial_bound: bound }
    }

    pub fn eval(&self, rho: f64, theta: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant(c) => *c,
            PotentialKind::GaussianBump { amplitude, width } => {
                let x = rho / width;
                amplitude * (-x * x).exp()
            }
            PotentialKind::TrigPolynomial { terms } => {
                terms.iter().map(|t| t.eval(rho, theta)).sum()
            }
            PotentialKind::Grid(field) => field.sample(rho, theta),
        }
    }

    /// Uniform norm `‖q‖` on the closed disc.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// The growth bound `sup(|q| + ρ|q_ρ|)` controlling the frequency
    /// integral; its square root is the cosh rate `γ`.
    pub fn radial_derivative_bound(&self) -> f64 {
        self.radial_bound
    }

    /// Samples the potential on a working grid.
    pub fn on_grid(&self, grid: PolarGrid) -> PolarField {
        PolarField::from_fn(grid, |rho, theta| self.eval(rho, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation_and_geometry() {
        assert!(PolarGrid::new(4, 256).is_err());
        assert!(PolarGrid::new(128, 255).is_err());
        let g = PolarGrid::default_resolution();
        assert_eq!(g.rings(), 129);
        assert!((g.radius(128) - 1.0).abs() < 1e-15);
        assert!((g.angle(64) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn field_sampling_round_trips_grid_nodes() {
        let g = PolarGrid::new(16, 32).unwrap();
        let f = PolarField::from_fn(g, |rho, theta| rho * theta.cos());
        assert!((f.sample(g.radius(5), g.angle(7)) - f.value(5, 7)).abs() < 1e-14);
        // Halfway between rings the bilinear value sits between neighbours.
        let mid = f.sample(g.radius(5) + 0.5 * g.radial_step(), 0.0);
        assert!(mid > f.value(5, 0) && mid < f.value(6, 0));
    }

    #[test]
    fn constant_potential_has_exact_bounds() {
        let q = Potential::constant(-0.07);
        assert_eq!(q.sup_norm(), 0.07);
        assert_eq!(q.radial_derivative_bound(), 0.07);
        assert_eq!(q.eval(0.3, 1.0), -0.07);
    }

    #[test]
    fn gaussian_bump_bounds_match_calculus() {
        // For a e^{-(rho/w)^2} the maximum of |q| + rho|q_rho| is at
        // rho = w/sqrt(2) if that is inside the disc: a e^{-1/2} (1 + 1) when
        // x = 1/sqrt(2) maximises (1 + 2x^2) e^{-x^2} ... scan against the
        // 1d closed form directly.
        let q = Potential::gaussian_bump(0.08, 0.5).unwrap();
        assert!((q.sup_norm() - 0.08).abs() < 1e-12);
        let expect = (0..=100_000)
            .map(|i| {
                let rho = i as f64 / 100_000.0;
                let x = rho / 0.5;
                0.08 * (-x * x).exp() * (1.0 + 2.0 * x * x)
            })
            .fold(0.0f64, f64::max);
        assert!((q.radial_derivative_bound() - expect).abs() < 1e-6);
    }

    #[test]
    fn seeded_potential_is_reproducible_and_normalised() {
        let a = Potential::seeded_trig(9, 0.08).unwrap();
        let b = Potential::seeded_trig(9, 0.08).unwrap();
        assert_eq!(a.eval(0.4, 1.3), b.eval(0.4, 1.3));
        assert!((a.sup_norm() - 0.08).abs() < 1e-12);
        let c = Potential::seeded_trig(10, 0.08).unwrap();
        assert_ne!(a.eval(0.4, 1.3), c.eval(0.4, 1.3));
    }

    #[test]
    fn csv_round_trip_and_rejection() {
        let g = PolarGrid::new(8, 8).unwrap();
        let f = PolarField::from_fn(g, |rho, _| rho * rho);
        let mut text = String::from("8,8\n");
        for i in 0..g.rings() {
            let row: Vec<String> = (0..8).map(|k| format!("{}", f.value(i, k))).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let q = Potential::from_csv_str(&text).unwrap();
        assert!((q.eval(0.5, 0.0) - 0.25).abs() < 1e-12);
        assert!((q.sup_norm() - 1.0).abs() < 1e-12);

        assert!(Potential::from_csv_str("").is_err());
        assert!(Potential::from_csv_str("8\n1,2").is_err());
        assert!(Potential::from_csv_str("8,8\n1,2,3").is_err());
    }
}
