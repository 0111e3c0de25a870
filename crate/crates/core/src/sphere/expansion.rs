//! Expansions over the vanishing basis with unit-norm gauge.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::basis::ln_basis_norm;
use super::{SphereGrid, SpherePoint};
use crate::field::LegendreTable;
use crate::util::{field_u64, fmt17, parse_f64, task_rng};
use crate::{C64, NodalError, Result};

/// Degrees past this are out of scope for the sphere experiments.
const DEGREE_LIMIT: usize = 256;

/// Above this degree the Legendre derivative columns leave native `f64`
/// range and evaluation switches to signed-log columns.
const NATIVE_COLUMNS_LIMIT: usize = 128;

/// A spherical harmonic `f = sum_j gamma_j e_j / ||e_j||`, `j = -N..N`
/// without 0, eigenvalue `N(N+1)`.
///
/// Coefficients are recorded against the unit-L2-norm multiples of the raw
/// basis: the raw norms `||e_j||` span hundreds of orders of magnitude, so
/// raw-gauge coefficients of anything resembling a random eigenfunction
/// would leave `f64` range. The norms are public through [`ln_basis_norm`],
/// so the gauges are interconvertible in log space.
#[derive(Clone, Debug)]
pub struct SphericalHarmonicExpansion {
    degree: usize,
    /// Order `j = -N..=-1` then `1..=N`.
    gamma: Vec<C64>,
    /// `ln ||e_m||` for `m = 1..=N` (index `m - 1`).
    ln_norms: Vec<f64>,
    table: LegendreTable,
}

impl SphericalHarmonicExpansion {
    /// Wraps `2N` coefficients ordered `j = -N..-1, 1..N`.
    pub fn new(degree: usize, gamma: Vec<C64>) -> Result<Self> {
        if degree == 0 {
            return Err(NodalError::Precondition(
                "degree-0 expansions have no vanishing basis".into(),
            ));
        }
        if degree > DEGREE_LIMIT {
            return Err(NodalError::Capability {
                context: "spherical harmonic degree",
                requested: degree,
                max_safe: DEGREE_LIMIT,
            });
        }
        if gamma.len() != 2 * degree {
            return Err(NodalError::Precondition(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree,
                gamma.len()
            )));
        }
        let ln_norms = (1..=degree)
            .map(|m| ln_basis_norm(degree, m))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SphericalHarmonicExpansion {
            degree,
            gamma,
            ln_norms,
            table: LegendreTable::new(degree),
        })
    }

    /// A single unit-gauge basis element.
    pub fn single(degree: usize, order: i64) -> Result<Self> {
        let mut gamma = vec![C64::new(0.0, 0.0); 2 * degree];
        let idx = Self::index_of(degree, order)?;
        gamma[idx] = C64::new(1.0, 0.0);
        Self::new(degree, gamma)
    }

    /// Independent standard complex Gaussian coefficients (`E |gamma|^2 =
    /// 1`), reproducible in the seed.
    pub fn random(degree: usize, seed: u64) -> Result<Self> {
        let mut rng = task_rng(seed, 0);
        let gamma = (0..2 * degree)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        Self::new(degree, gamma)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `lambda_N = N(N+1)`, exact.
    pub fn eigenvalue(&self) -> f64 {
        (self.degree * (self.degree + 1)) as f64
    }

    fn index_of(degree: usize, order: i64) -> Result<usize> {
        let m = order.unsigned_abs() as usize;
        if order == 0 || m > degree {
            return Err(NodalError::OutOfDomain {
                context: "expansion order",
                value: order as f64,
                limit: degree as f64,
            });
        }
        Ok(if order < 0 {
            (order + degree as i64) as usize
        } else {
            (order + degree as i64 - 1) as usize
        })
    }

    pub fn coefficient(&self, order: i64) -> Result<C64> {
        Ok(self.gamma[Self::index_of(self.degree, order)?])
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.gamma
    }

    /// Every coefficient scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for g in out.gamma.iter_mut() {
            *g *= factor;
        }
        out
    }

    /// Rotation by `phi` about the polar axis: `gamma_j -> gamma_j e^{i j
    /// phi}`, so that the rotated expansion at a point equals the original
    /// at the point advanced by `phi` in longitude.
    pub fn rotated_about_pole(&self, phi: f64) -> Self {
        let mut out = self.clone();
        for j in 1..=self.degree as i64 {
            let w = C64::from_polar(1.0, j as f64 * phi);
            let ip = Self::index_of(self.degree, j).unwrap();
            let im = Self::index_of(self.degree, -j).unwrap();
            out.gamma[ip] *= w;
            out.gamma[im] *= w.conj();
        }
        out
    }

    /// Unit-gauge radial factors `t_m = L_N^(m)(x3) r^m / ||e_m||` for `m =
    /// 1..=N`. These are the expensive, longitude-independent part of an
    /// evaluation; one row of a lat-long grid shares them.
    fn radial_factors(&self, x3: f64, r: f64) -> Vec<f64> {
        let ln_r = r.ln();
        if self.degree <= NATIVE_COLUMNS_LIMIT {
            let cols = self.table.derivative_columns(x3);
            (1..=self.degree)
                .map(|m| cols[m] * (m as f64 * ln_r - self.ln_norms[m - 1]).exp())
                .collect()
        } else {
            let cols = self.table.derivative_columns_signed(x3);
            (1..=self.degree)
                .map(|m| {
                    let c = cols[m];
                    c.sign as f64
                        * (c.ln_abs + m as f64 * ln_r - self.ln_norms[m - 1]).exp()
                })
                .collect()
        }
    }

    /// Accumulates `sum_j gamma_j t_|j| e^{i j phi}` given radial factors.
    fn combine(&self, factors: &[f64], phi: f64) -> C64 {
        let w = C64::from_polar(1.0, phi);
        let mut phase = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        let n = self.degree as i64;
        for m in 1..=n {
            phase *= w;
            let t = factors[(m - 1) as usize];
            let plus = self.gamma[Self::index_of(n as usize, m).unwrap()];
            let minus = self.gamma[Self::index_of(n as usize, -m).unwrap()];
            acc += t * (plus * phase + minus * phase.conj());
        }
        acc
    }

    pub fn eval_point(&self, p: &SpherePoint) -> C64 {
        let r = p.chart_r();
        if r == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let factors = self.radial_factors(p.x3(), r);
        self.combine(&factors, p.x2().atan2(p.x1()))
    }

    pub fn real_at(&self, p: &SpherePoint) -> f64 {
        self.eval_point(p).re
    }

    /// Row-major complex values on a lat-long grid, sharing the Legendre
    /// columns across each row.
    pub fn eval_grid(&self, grid: &SphereGrid) -> Vec<C64> {
        let cols = grid.cols();
        let mut values = vec![C64::new(0.0, 0.0); grid.rows() * cols];
        values
            .par_chunks_mut(cols)
            .enumerate()
            .for_each(|(i, row)| {
                let theta = grid.thetas[i];
                let factors = self.radial_factors(theta.cos(), theta.sin());
                for (k, v) in row.iter_mut().enumerate() {
                    *v = self.combine(&factors, grid.phis[k]);
                }
            });
        values
    }

    /// `Re f` on the grid, row-major.
    pub fn real_grid(&self, grid: &SphereGrid) -> Vec<f64> {
        self.eval_grid(grid).into_iter().map(|v| v.re).collect()
    }

    /// Versioned JSON artifact in the same style as the polynomial
    /// documents; floats as 17-significant-digit strings.
    pub fn to_json(&self) -> Value {
        json!({
            "format": "spherical-expansion",
            "version": 1,
            "degree": self.degree,
            "eigenvalue": self.degree * (self.degree + 1),
            "gauge": "unit-l2-basis",
            "gamma": self
                .gamma
                .iter()
                .map(|c| json!([fmt17(c.re), fmt17(c.im)]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        if doc.get("format").and_then(Value::as_str) != Some("spherical-expansion") {
            return Err(NodalError::Format(
                "not a spherical-expansion document".into(),
            ));
        }
        if doc.get("version").and_then(Value::as_u64) != Some(1) {
            return Err(NodalError::Format(
                "unsupported spherical-expansion version".into(),
            ));
        }
        let degree = field_u64(doc, "degree")? as usize;
        let gamma = doc
            .get("gamma")
            .and_then(Value::as_array)
            .ok_or_else(|| NodalError::Format("missing gamma array".into()))?
            .iter()
            .map(|pair| {
                let parts = pair
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| NodalError::Format("gamma entries are [re, im]".into()))?;
                Ok(C64::new(parse_f64(&parts[0])?, parse_f64(&parts[1])?))
            })
            .collect::<Result<Vec<C64>>>()?;
        Self::new(degree, gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::eval_basis;

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let a = SphericalHarmonicExpansion::random(9, 7).unwrap();
        let b = SphericalHarmonicExpansion::random(9, 7).unwrap();
        let c = SphericalHarmonicExpansion::random(9, 8).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        assert_ne!(a.coefficients(), c.coefficients());
    }

    #[test]
    fn coefficient_variance_is_unit() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..1000u64 {
            let e = SphericalHarmonicExpansion::random(4, seed).unwrap();
            sum += e.coefficients().iter().map(C64::norm_sqr).sum::<f64>();
            count += e.coefficients().len();
        }
        let mean = sum / count as f64;
        assert!((mean - 1.0).abs() < 0.1, "E|gamma|^2 = {mean}");
    }

    #[test]
    fn vanishes_at_the_marked_point() {
        let e = SphericalHarmonicExpansion::random(25, 3).unwrap();
        assert_eq!(e.eval_point(&SpherePoint::north_pole()), C64::new(0.0, 0.0));
    }

    #[test]
    fn eigenvalue_is_exact() {
        let e = SphericalHarmonicExpansion::random(17, 0).unwrap();
        assert_eq!(e.eigenvalue(), 306.0);
    }

    #[test]
    fn single_element_matches_raw_basis_over_norm() {
        let n = 11usize;
        for order in [3i64, -7] {
            let e = SphericalHarmonicExpansion::single(n, order).unwrap();
            let p = SpherePoint::from_spherical(1.9, 2.4);
            let want = eval_basis(n, order, &p).unwrap()
                * (-ln_basis_norm(n, order.unsigned_abs() as usize).unwrap()).exp();
            let got = e.eval_point(&p);
            assert!((got - want).norm() < 1e-12 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn rotation_moves_the_argument() {
        let e = SphericalHarmonicExpansion::random(6, 42).unwrap();
        let phi = 0.83;
        let rot = e.rotated_about_pole(phi);
        for k in 0..10 {
            let p = SpherePoint::from_spherical(0.3 + 0.25 * k as f64, 0.7 * k as f64);
            let advanced = p.rotated_about_pole(phi);
            let a = rot.eval_point(&p);
            let b = e.eval_point(&advanced);
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let e = SphericalHarmonicExpansion::random(13, 5).unwrap();
        let grid = SphereGrid::new(12, 16).unwrap();
        let values = e.eval_grid(&grid);
        for i in [0usize, 5, 11] {
            for k in [0usize, 7, 15] {
                let direct = e.eval_point(&grid.point(i, k));
                let cached = values[i * grid.cols() + k];
                assert!((direct - cached).norm() < 1e-11 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let e = SphericalHarmonicExpansion::random(8, 123).unwrap();
        let back = SphericalHarmonicExpansion::from_json(&e.to_json()).unwrap();
        assert_eq!(back.degree(), e.degree());
        for (a, b) in back.coefficients().iter().zip(e.coefficients()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert!(SphericalHarmonicExpansion::from_json(&json!({"format": "other"})).is_err());
    }

    #[test]
    fn degree_and_shape_validation() {
        assert!(SphericalHarmonicExpansion::new(0, vec![]).is_err());
        assert!(SphericalHarmonicExpansion::new(3, vec![C64::new(1.0, 0.0); 5]).is_err());
        assert!(matches!(
            SphericalHarmonicExpansion::random(400, 0),
            Err(NodalError::Capability { .. })
        ));
    }
}
