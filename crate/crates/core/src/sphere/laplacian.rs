//! Laplace-Beltrami residuals on lat-long grids.

use rayon::prelude::*;

use super::{SphereGrid, SphericalHarmonicExpansion};

/// `max |Delta f + N(N+1) f| / max |f|` over the interior of the grid by
/// second-order central differences in spherical coordinates,
///
/// ```text
/// Delta f = f_tt + cot(theta) f_t + f_pp / sin^2(theta).
/// ```
///
/// The two rows nearest each pole are excluded from both maxima: the
/// `cot(theta)` and `1/sin^2(theta)` stencil weights blow up there, which is
/// a defect of the coordinates rather than of `f`. Longitude wraps around.
/// Returns 0 for an identically zero field. The caller picks the resolution;
/// 16 points per wavelength `2 pi / N` keeps the residual well under the
/// discretisation noise of anything else measured on the grid.
pub fn laplace_beltrami_residual(
    expansion: &SphericalHarmonicExpansion,
    grid: &SphereGrid,
) -> f64 {
    let rows = grid.rows();
    let cols = grid.cols();
    let values = expansion.eval_grid(grid);
    let h_t = grid.theta_step();
    let h_p = grid.phi_step();
    let lambda = expansion.eigenvalue();

    let per_row: Vec<(f64, f64)> = (2..rows - 2)
        .into_par_iter()
        .map(|i| {
            let theta = grid.thetas[i];
            let sin = theta.sin();
            let cot = theta.cos() / sin;
            let inv_sin2 = 1.0 / (sin * sin);
            let mut max_res = 0.0f64;
            let mut max_val = 0.0f64;
            for k in 0..cols {
                let f = values[i * cols + k];
                let up = values[(i - 1) * cols + k];
                let down = values[(i + 1) * cols + k];
                let left = values[i * cols + (k + cols - 1) % cols];
                let right = values[i * cols + (k + 1) % cols];
                let f_tt = (down - 2.0 * f + up) / (h_t * h_t);
                let f_t = (down - up) / (2.0 * h_t);
                let f_pp = (right - 2.0 * f + left) / (h_p * h_p);
                let delta = f_tt + cot * f_t + inv_sin2 * f_pp;
                max_res = max_res.max((delta + lambda * f).norm());
                max_val = max_val.max(f.norm());
            }
            (max_res, max_val)
        })
        .collect();

    let (max_res, max_val) = per_row
        .into_iter()
        .fold((0.0f64, 0.0f64), |(r, v), (pr, pv)| (r.max(pr), v.max(pv)));
    if max_val == 0.0 {
        return 0.0;
    }
    max_res / max_val
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn first_degree_basis_has_small_residual() {
        let e = SphericalHarmonicExpansion::single(1, 1).unwrap();
        let grid = SphereGrid::new(512, 1024).unwrap();
        let res = laplace_beltrami_residual(&e, &grid);
        assert!(res < 1e-3, "residual {res}");
    }

    #[test]
    fn residual_quarters_when_resolution_doubles() {
        // A high-order sectoral element vanishes fast enough at the poles
        // that the cot/sin stencil weights stay harmless near the excluded
        // rows and the pure O(h^2) rate shows.
        let e = SphericalHarmonicExpansion::single(6, 5).unwrap();
        let coarse = laplace_beltrami_residual(&e, &SphereGrid::new(96, 192).unwrap());
        let fine = laplace_beltrami_residual(&e, &SphereGrid::new(192, 384).unwrap());
        let ratio = coarse / fine;
        assert!((2.8..=5.2).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let e = SphericalHarmonicExpansion::new(3, vec![C64::new(0.0, 0.0); 6]).unwrap();
        let grid = SphereGrid::new(32, 64).unwrap();
        assert_eq!(laplace_beltrami_residual(&e, &grid), 0.0);
    }

    #[test]
    fn random_expansions_satisfy_the_eigenequation() {
        for seed in [1u64, 2] {
            let e = SphericalHarmonicExpansion::random(8, seed).unwrap();
            let grid = SphereGrid::new(1024, 2048).unwrap();
            let res = laplace_beltrami_residual(&e, &grid);
            assert!(res < 5e-2, "seed {seed}: residual {res}");
        }
    }
}
