//! Doubling exponents of fields over concentric discs.

use rayon::prelude::*;
use std::f64::consts::PI;

use super::{max_on_circle, Disc};
use crate::{C64, NodalError, Result};

fn max_on_disc_grid(
    f: &(impl Fn(C64) -> f64 + Sync),
    disc: &Disc,
    n_rho: usize,
    n_theta: usize,
) -> f64 {
    let rows: Vec<f64> = (0..n_rho)
        .into_par_iter()
        .map(|i| {
            let rho = disc.radius * i as f64 / (n_rho - 1) as f64;
            let mut best = 0.0f64;
            for k in 0..n_theta {
                let theta = 2.0 * PI * k as f64 / n_theta as f64;
                best = best.max(f(disc.point(rho, theta)).abs());
            }
            best
        })
        .collect();
    rows.into_iter().fold(0.0, f64::max)
}

/// Doubling exponent at the default 512 x 1024 polar resolution (the grid
/// only matters when `boundary_only` is off).
pub fn doubling_exponent(
    f: impl Fn(C64) -> f64 + Sync,
    disc: &Disc,
    boundary_only: bool,
) -> Result<f64> {
    doubling_exponent_grid(f, disc, boundary_only, 512, 1024)
}

/// `log(max_D |f| / max_{D/2} |f|)` for the concentric half disc.
///
/// With `boundary_only` set the disc maxima are taken on the boundary
/// circles, which is exact for harmonic or analytic inputs by the maximum
/// principle; otherwise both maxima come from a polar grid scan over the
/// closed disc at the given resolution.
pub fn doubling_exponent_grid(
    f: impl Fn(C64) -> f64 + Sync,
    disc: &Disc,
    boundary_only: bool,
    n_rho: usize,
    n_theta: usize,
) -> Result<f64> {
    let half = disc.half();
    let (outer, inner) = if boundary_only {
        (
            max_on_circle(&f, disc.center, disc.radius),
            max_on_circle(&f, half.center, half.radius),
        )
    } else {
        (
            max_on_disc_grid(&f, disc, n_rho, n_theta),
            max_on_disc_grid(&f, &half, n_rho, n_theta),
        )
    };
    if inner < 1e-300 {
        return Err(NodalError::Degenerate(format!(
            "field max on the half disc is {inner:.3e}; doubling exponent undefined"
        )));
    }
    Ok((outer / inner).ln())
}

/// Maximum doubling exponent over the disc family `centers x radii`: a lower
/// bound for the true supremum over all discs.
pub fn doubling_sup(
    f: impl Fn(C64) -> f64 + Sync,
    centers: &[C64],
    radii: &[f64],
    boundary_only: bool,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &c in centers {
        for &r in radii {
            let disc = Disc::new(c, r)?;
            best = best.max(doubling_exponent(&f, &disc, boundary_only)?);
        }
    }
    Ok(best)
}
