//! Truncated power series with an attached validity radius.

use crate::error::{NodalError, Result};
use crate::C64;

/// A finite power series `sum a_n z^n` trusted on `|z| <= validity_radius`.
#[derive(Clone, Debug)]
pub struct CoefficientSeries {
    coefficients: Vec<C64>,
    validity_radius: f64,
}

impl CoefficientSeries {
    pub fn new(coefficients: Vec<C64>, validity_radius: f64) -> Self {
        assert!(
            validity_radius > 0.0 && validity_radius.is_finite(),
            "validity radius must be positive and finite"
        );
        CoefficientSeries {
            coefficients,
            validity_radius,
        }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Horner evaluation. `z = 0` returns the constant term exactly.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let r = z.norm();
        // Tiny slack so points generated as "on the boundary" do not trip
        // the domain check through rounding.
        if r > self.validity_radius * (1.0 + 1e-12) {
            return Err(NodalError::OutOfDomain {
                context: "coefficient series evaluation",
                value: r,
                limit: self.validity_radius,
            });
        }
        let mut acc = C64::new(0.0, 0.0);
        for &a in self.coefficients.iter().rev() {
            acc = acc * z + a;
        }
        Ok(acc)
    }

    /// Real part of the series at `z`; convenience for harmonic sampling.
    pub fn eval_re(&self, z: C64) -> Result<f64> {
        Ok(self.eval(z)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_series(terms: usize) -> CoefficientSeries {
        let mut c = Vec::with_capacity(terms + 1);
        let mut inv_fact = 1.0;
        for n in 0..=terms {
            if n > 0 {
                inv_fact /= n as f64;
            }
            c.push(C64::new(inv_fact, 0.0));
        }
        CoefficientSeries::new(c, 2.0)
    }

    #[test]
    fn truncated_exponential_matches_exp() {
        let s = exp_series(30);
        let v = s.eval(C64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 1.0f64.exp()).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn constant_term_is_exact_at_origin() {
        let s = CoefficientSeries::new(vec![C64::new(0.25, -1.5), C64::new(7.0, 0.0)], 1.0);
        assert_eq!(s.eval(C64::new(0.0, 0.0)).unwrap(), C64::new(0.25, -1.5));
    }

    #[test]
    fn outside_validity_radius_is_an_error() {
        let s = exp_series(5);
        let err = s.eval(C64::new(2.5, 0.0)).unwrap_err();
        assert!(matches!(err, NodalError::OutOfDomain { .. }));
    }
}
