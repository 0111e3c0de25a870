//! The vanishing-at-the-pole basis `e_j = L_N^(j)(x3) z^j`.

use std::f64::consts::PI;

use super::SpherePoint;
use crate::field::LegendreTable;
use crate::util::ln_product_range;
use crate::{C64, NodalError, Result};

/// `ln` of the L2 norm of the raw basis element over the whole sphere:
///
/// ```text
/// ||e_j||^2 = 4 pi / (2N + 1) * (N + j)! / (N - j)!
/// ```
///
/// The norms span hundreds of orders of magnitude across `j`, hence the log.
pub fn ln_basis_norm(degree: usize, order: usize) -> Result<f64> {
    check_order(degree, order as i64)?;
    let n = degree;
    let j = order;
    Ok(0.5
        * ((4.0 * PI).ln() - ((2 * n + 1) as f64).ln() + ln_product_range(n - j + 1, n + j)))
}

/// The raw basis element `e_j` at a point of the sphere; negative orders
/// conjugate the chart power. Magnitudes beyond `f64` range overflow to
/// infinity, which only happens for degrees past this module's use.
pub fn eval_basis(degree: usize, order: i64, point: &SpherePoint) -> Result<C64> {
    check_order(degree, order)?;
    let m = order.unsigned_abs() as usize;
    let table = LegendreTable::new(degree);
    let col = table.derivative_columns_signed(point.x3())[m];
    let r = point.chart_r();
    let ln_mag = col.ln_abs + m as f64 * r.ln();
    let phase = order as f64 * point.x2().atan2(point.x1());
    Ok(C64::from_polar(col.sign as f64 * ln_mag.exp(), phase))
}

fn check_order(degree: usize, order: i64) -> Result<()> {
    if degree == 0 {
        return Err(NodalError::Precondition(
            "degree-0 eigenspace has no basis vanishing at the pole".into(),
        ));
    }
    if order == 0 {
        return Err(NodalError::Precondition(
            "order 0 is not in the vanishing basis".into(),
        ));
    }
    if order.unsigned_abs() as usize > degree {
        return Err(NodalError::OutOfDomain {
            context: "basis order",
            value: order.unsigned_abs() as f64,
            limit: degree as f64,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::gauss_legendre;

    #[test]
    fn every_order_vanishes_at_the_pole() {
        let pole = SpherePoint::north_pole();
        for n in [1usize, 5, 12] {
            for j in [1i64, -1, n as i64, -(n as i64)] {
                let v = eval_basis(n, j, &pole).unwrap();
                assert_eq!(v, C64::new(0.0, 0.0), "N={n} j={j}");
            }
        }
    }

    #[test]
    fn first_degree_on_the_equator_is_a_pure_phase() {
        // L_1' = 1, so e_1 = z = e^{i phi} on the equator.
        for k in 0..8 {
            let phi = 0.7 * k as f64;
            let p = SpherePoint::from_spherical(std::f64::consts::FRAC_PI_2, phi);
            let v = eval_basis(1, 1, &p).unwrap();
            assert!((v - C64::from_polar(1.0, phi)).norm() < 1e-14, "phi={phi}");
        }
    }

    #[test]
    fn sectoral_element_scales_as_the_chart_power() {
        // L_8^(8) is constant, so |e_8| is exactly proportional to r^8.
        let p1 = SpherePoint::from_spherical(0.4, 1.3);
        let p2 = SpherePoint::from_spherical(1.1, 5.2);
        let v1 = eval_basis(8, 8, &p1).unwrap().norm();
        let v2 = eval_basis(8, 8, &p2).unwrap().norm();
        let want = (p1.chart_r() / p2.chart_r()).powi(8);
        assert!((v1 / v2 - want).abs() <= 1e-12 * want, "{} vs {want}", v1 / v2);
    }

    #[test]
    fn negative_orders_conjugate() {
        let p = SpherePoint::from_spherical(2.0, 0.9);
        for n in [3usize, 7] {
            for j in 1..=n as i64 {
                let plus = eval_basis(n, j, &p).unwrap();
                let minus = eval_basis(n, -j, &p).unwrap();
                assert!((minus - plus.conj()).norm() < 1e-12 * plus.norm().max(1e-12));
            }
        }
    }

    #[test]
    fn norm_formula_matches_quadrature() {
        // ||e_j||^2 = 2 pi Int_{-1}^{1} [L_N^(j)(x)]^2 (1 - x^2)^j dx; the
        // integrand is a polynomial of degree 2N, so 64-point Gauss-Legendre
        // is exact well beyond the degrees probed here.
        let (nodes, weights) = gauss_legendre(64);
        for n in [2usize, 6, 20] {
            let table = LegendreTable::new(n);
            for j in 1..=n {
                let quad: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &w)| {
                        let l = table.derivative(j, x);
                        w * l * l * (1.0 - x * x).powi(j as i32)
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI;
                let want = 2.0 * ln_basis_norm(n, j).unwrap();
                assert!(
                    (quad.ln() - want).abs() < 1e-10,
                    "N={n} j={j}: {} vs {want}",
                    quad.ln()
                );
            }
        }
    }

    #[test]
    fn order_validation() {
        let p = SpherePoint::north_pole();
        assert!(eval_basis(4, 5, &p).is_err());
        assert!(eval_basis(4, -5, &p).is_err());
        assert!(eval_basis(4, 0, &p).is_err());
        assert!(ln_basis_norm(4, 5).is_err());
        assert!(eval_basis(4, 4, &p).is_ok());
    }
}
