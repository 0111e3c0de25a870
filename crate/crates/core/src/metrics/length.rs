//! Nodal-set length by marching squares.

use rayon::prelude::*;

use super::Disc;
use crate::C64;

type Point = (f64, f64);

fn interp(p1: Point, v1: f64, p2: Point, v2: f64) -> Point {
    let t = v1 / (v1 - v2);
    (p1.0 + t * (p2.0 - p1.0), p1.1 + t * (p2.1 - p1.1))
}

/// Piecewise-linear zero-contour segments of one cell. Saddle cells are
/// disambiguated by the corner average standing in for the center value.
fn cell_segments(
    corners: [(Point, f64); 4], // order: (x,y), (x+dx,y), (x+dx,y+dy), (x,y+dy)
    out: &mut Vec<(Point, Point)>,
) {
    let [(p00, v00), (p10, v10), (p11, v11), (p01, v01)] = corners;
    let b = [v00 > 0.0, v10 > 0.0, v11 > 0.0, v01 > 0.0];
    if b.iter().all(|&x| x) || b.iter().all(|&x| !x) {
        return;
    }
    let bottom = (b[0] != b[1]).then(|| interp(p00, v00, p10, v10));
    let right = (b[1] != b[2]).then(|| interp(p10, v10, p11, v11));
    let top = (b[3] != b[2]).then(|| interp(p01, v01, p11, v11));
    let left = (b[0] != b[3]).then(|| interp(p00, v00, p01, v01));
    let mut crossings: Vec<Point> = Vec::with_capacity(4);
    for c in [bottom, right, top, left].into_iter().flatten() {
        crossings.push(c);
    }
    match crossings.len() {
        2 => out.push((crossings[0], crossings[1])),
        4 => {
            // Saddle: opposite corners share a sign.
            let center = 0.25 * (v00 + v10 + v11 + v01);
            let (bottom, right, top, left) =
                (bottom.unwrap(), right.unwrap(), top.unwrap(), left.unwrap());
            if (center > 0.0) == b[0] {
                out.push((bottom, right));
                out.push((top, left));
            } else {
                out.push((bottom, left));
                out.push((top, right));
            }
        }
        _ => {}
    }
}

/// Total contour length of `{f = 0}` over a chart grid.
///
/// `values` is row-major with `values[j * xs.len() + i]` sampled at
/// `(xs[i], ys[j])`. Each segment's contribution is delegated to `seg_len`,
/// which receives the endpoints and the cell center so charts with a
/// non-Euclidean metric can weight accordingly.
pub fn nodal_length_chart(
    values: &[f64],
    xs: &[f64],
    ys: &[f64],
    seg_len: impl Fn(Point, Point, Point) -> f64,
) -> f64 {
    let nx = xs.len();
    let ny = ys.len();
    assert_eq!(values.len(), nx * ny, "grid shape mismatch");
    let mut total = 0.0;
    let mut segs = Vec::with_capacity(2);
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [
                ((xs[i], ys[j]), values[j * nx + i]),
                ((xs[i + 1], ys[j]), values[j * nx + i + 1]),
                ((xs[i + 1], ys[j + 1]), values[(j + 1) * nx + i + 1]),
                ((xs[i], ys[j + 1]), values[(j + 1) * nx + i]),
            ];
            segs.clear();
            cell_segments(corners, &mut segs);
            if segs.is_empty() {
                continue;
            }
            let cc = (
                0.5 * (xs[i] + xs[i + 1]),
                0.5 * (ys[j] + ys[j + 1]),
            );
            for &(p, q) in segs.iter() {
                total += seg_len(p, q, cc);
            }
        }
    }
    total
}

/// Euclidean length of the portion of segment `p`-`q` inside the disc.
fn clipped_length(p: Point, q: Point, disc: &Disc) -> f64 {
    let inside = |pt: Point| {
        let dx = pt.0 - disc.center.re;
        let dy = pt.1 - disc.center.im;
        dx * dx + dy * dy <= disc.radius * disc.radius
    };
    let full = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
    match (inside(p), inside(q)) {
        (true, true) => full,
        (false, false) => 0.0,
        (p_in, _) => {
            // One endpoint inside: cut at the circle crossing.
            let (a, b) = if p_in { (p, q) } else { (q, p) };
            let dx = b.0 - a.0;
            let dy = b.1 - a.1;
            let fx = a.0 - disc.center.re;
            let fy = a.1 - disc.center.im;
            let qa = dx * dx + dy * dy;
            let qb = 2.0 * (fx * dx + fy * dy);
            let qc = fx * fx + fy * fy - disc.radius * disc.radius;
            let disc_val = (qb * qb - 4.0 * qa * qc).max(0.0);
            let t = (-qb + disc_val.sqrt()) / (2.0 * qa);
            full * t.clamp(0.0, 1.0)
        }
    }
}

/// Marching-squares length of the nodal set of `f` inside the disc, sampled
/// on an `n x n` cell grid over the bounding square with segments clipped at
/// the boundary circle. The caller picks `n` fine enough for the field's
/// oscillation (at least 8 cells per wavelength).
pub fn nodal_length_disc(f: impl Fn(C64) -> f64 + Sync, disc: &Disc, n: usize) -> f64 {
    let xs: Vec<f64> = (0..=n)
        .map(|i| disc.center.re - disc.radius + 2.0 * disc.radius * i as f64 / n as f64)
        .collect();
    let ys: Vec<f64> = (0..=n)
        .map(|j| disc.center.im - disc.radius + 2.0 * disc.radius * j as f64 / n as f64)
        .collect();
    let values: Vec<f64> = (0..(n + 1) * (n + 1))
        .into_par_iter()
        .map(|idx| f(C64::new(xs[idx % (n + 1)], ys[idx / (n + 1)])))
        .collect();
    nodal_length_chart(&values, &xs, &ys, |p, q, _| clipped_length(p, q, disc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameter_of_half_plane_cut() {
        let len = nodal_length_disc(|z| z.re, &Disc::unit(), 512);
        assert!((len - 2.0).abs() < 0.02, "{len}");
    }

    #[test]
    fn two_diameters_of_quadrant_field() {
        let len = nodal_length_disc(|z| (z * z).re, &Disc::unit(), 512);
        assert!((len - 4.0).abs() < 0.04, "{len}");
    }

    #[test]
    fn interior_circle_has_length_pi() {
        let len = nodal_length_disc(|z| z.norm_sqr() - 0.25, &Disc::unit(), 512);
        assert!((len - std::f64::consts::PI).abs() < 0.03, "{len}");
    }

    #[test]
    fn chart_reproduces_straight_line_exactly() {
        let n = 64usize;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let ys = xs.clone();
        let values: Vec<f64> = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| x + y - 1.0))
            .collect();
        let len = nodal_length_chart(&values, &xs, &ys, |p, q, _| {
            ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt()
        });
        assert!((len - 2.0f64.sqrt()).abs() < 1e-12, "{len}");
    }

    #[test]
    fn chart_metric_weight_is_applied() {
        let n = 32usize;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let ys = xs.clone();
        let values: Vec<f64> = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| x + y - 1.0))
            .collect();
        let len = nodal_length_chart(&values, &xs, &ys, |p, q, _| {
            2.0 * ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt()
        });
        assert!((len - 2.0 * 2.0f64.sqrt()).abs() < 1e-12, "{len}");
    }
}
