//! Legendre polynomials and their derivative columns.
//!
//! The recurrence
//!
//! ```text
//! (n + 1) L_{n+1}(x) = (2n + 1) x L_n(x) - n L_{n-1}(x)
//! ```
//!
//! differentiated j times gives a joint recurrence over all derivative orders
//!
//! ```text
//! (n + 1) L_{n+1}^(j) = (2n + 1) (x L_n^(j) + j L_n^(j-1)) - n L_{n-1}^(j),
//! ```
//!
//! which this module runs either natively (small degrees) or in signed-log
//! arithmetic: `L_N^(j)(1) = (N + j)! / (2^j j! (N - j)!)` overflows `f64`
//! once `N + j` is large even though ratios against it stay tame.

use crate::error::{NodalError, Result};
use crate::util::{ln_factorial, ln_product_range, SignedLog};

/// Degrees up to this bound keep every derivative value inside `f64` range.
const NATIVE_DEGREE_LIMIT: usize = 128;

/// Derivative evaluations for a fixed Legendre degree.
#[derive(Clone, Debug)]
pub struct LegendreTable {
    degree: usize,
    ln_at_one: Vec<f64>, // ln L_N^(j)(1) for j = 0..=degree
}

impl LegendreTable {
    pub fn new(degree: usize) -> Self {
        let n = degree;
        let ln_at_one = (0..=n)
            .map(|j| {
                ln_product_range(n - j + 1, n + j) - j as f64 * 2.0f64.ln() - ln_factorial(j)
            })
            .collect();
        LegendreTable { degree, ln_at_one }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `ln L_N^(j)(1)`; all derivatives are positive at 1.
    pub fn ln_at_one(&self, j: usize) -> f64 {
        assert!(j <= self.degree);
        self.ln_at_one[j]
    }

    /// `L_N^(j)(1)`, overflowing to infinity when out of `f64` range.
    pub fn at_one(&self, j: usize) -> f64 {
        self.ln_at_one(j).exp()
    }

    /// All derivative orders `j = 0..=degree` at `x`, in signed-log form.
    pub fn derivative_columns_signed(&self, x: f64) -> Vec<SignedLog> {
        assert!(x.abs() <= 1.0 + 1e-12, "Legendre argument outside [-1, 1]");
        let n_max = self.degree;
        let jw = n_max + 1;
        let xl = SignedLog::new(x);
        let mut prev = vec![SignedLog::ZERO; jw]; // row n-1
        let mut curr = vec![SignedLog::ZERO; jw]; // row n
        prev[0] = SignedLog::new(1.0); // L_0 = 1
        if n_max == 0 {
            return prev;
        }
        curr[0] = SignedLog::new(x); // L_1 = x
        if jw > 1 {
            curr[1] = SignedLog::new(1.0);
        }
        for n in 1..n_max {
            let mut next = vec![SignedLog::ZERO; jw];
            let c1 = SignedLog::new((2 * n + 1) as f64);
            let c2 = SignedLog::new(n as f64);
            let inv = 1.0 / (n + 1) as f64;
            for j in 0..jw.min(n + 2) {
                let mut t = xl.mul(curr[j]);
                if j > 0 {
                    t = t.add(curr[j - 1].scale(j as f64));
                }
                let v = c1.mul(t).add(c2.mul(prev[j]).mul(SignedLog::new(-1.0)));
                next[j] = v.scale(inv);
            }
            prev = curr;
            curr = next;
        }
        curr
    }

    /// Native derivative columns; only valid below the overflow degree.
    pub fn derivative_columns(&self, x: f64) -> Vec<f64> {
        assert!(
            self.degree <= NATIVE_DEGREE_LIMIT,
            "degree {} needs the signed-log path",
            self.degree
        );
        assert!(x.abs() <= 1.0 + 1e-12);
        let n_max = self.degree;
        let jw = n_max + 1;
        let mut prev = vec![0.0; jw];
        let mut curr = vec![0.0; jw];
        prev[0] = 1.0;
        if n_max == 0 {
            return prev;
        }
        curr[0] = x;
        if jw > 1 {
            curr[1] = 1.0;
        }
        for n in 1..n_max {
            let mut next = vec![0.0; jw];
            let c1 = (2 * n + 1) as f64;
            let c2 = n as f64;
            let inv = 1.0 / (n + 1) as f64;
            for j in 0..jw.min(n + 2) {
                let t = x * curr[j] + if j > 0 { j as f64 * curr[j - 1] } else { 0.0 };
                next[j] = (c1 * t - c2 * prev[j]) * inv;
            }
            prev = curr;
            curr = next;
        }
        curr
    }

    /// Single derivative value `L_N^(j)(x)` as `f64` (infinite on overflow).
    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        if j > self.degree {
            return 0.0;
        }
        if self.degree <= NATIVE_DEGREE_LIMIT {
            self.derivative_columns(x)[j]
        } else {
            self.derivative_columns_signed(x)[j].value()
        }
    }
}

/// `d^j/dx^j L_degree(x)` with argument and degree validation.
///
/// Orders above the degree return exactly 0; `|x| > 1` is a domain error.
pub fn legendre_derivative(degree: i64, order: i64, x: f64) -> Result<f64> {
    if degree < 0 {
        return Err(NodalError::Precondition(format!(
            "negative Legendre degree {degree}"
        )));
    }
    if order < 0 {
        return Err(NodalError::Precondition(format!(
            "negative derivative order {order}"
        )));
    }
    if !(x.is_finite() && x.abs() <= 1.0) {
        return Err(NodalError::OutOfDomain {
            context: "Legendre argument",
            value: x.abs(),
            limit: 1.0,
        });
    }
    if order > degree {
        return Ok(0.0);
    }
    Ok(LegendreTable::new(degree as usize).derivative(order as usize, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: explicit polynomial coefficients of L_n built by
    /// coefficient-vector recurrence, differentiated symbolically, evaluated
    /// by Horner. Exact in f64 for small degrees.
    fn oracle(degree: usize, order: usize, x: f64) -> f64 {
        let mut c_prev = vec![1.0f64]; // L_0
        let mut c_curr = vec![0.0, 1.0]; // L_1
        if degree == 0 {
            c_curr = c_prev.clone();
        }
        for n in 1..degree {
            let mut next = vec![0.0; n + 2];
            for (k, &a) in c_curr.iter().enumerate() {
                next[k + 1] += (2.0 * n as f64 + 1.0) * a;
            }
            for (k, &a) in c_prev.iter().enumerate() {
                next[k] -= n as f64 * a;
            }
            for v in next.iter_mut() {
                *v /= (n + 1) as f64;
            }
            c_prev = c_curr;
            c_curr = next;
        }
        let mut c = c_curr;
        for _ in 0..order {
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| k as f64 * a)
                .collect();
            if c.is_empty() {
                return 0.0;
            }
        }
        c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    #[test]
    fn closed_form_values_at_one() {
        // L_2'(1) = 3, L_5'''(1) = 420.
        assert!((legendre_derivative(2, 1, 1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((legendre_derivative(5, 3, 1.0).unwrap() - 420.0).abs() < 1e-9);
    }

    #[test]
    fn matches_symbolic_oracle_on_grid() {
        for degree in [3usize, 8, 14, 20] {
            // The explicit-coefficient oracle loses digits to alternating-sum
            // cancellation as the degree grows; the recurrence does not.
            let tol = if degree <= 8 { 1e-12 } else { 5e-9 };
            let table = LegendreTable::new(degree);
            for order in 0..=8.min(degree) {
                for i in 0..9 {
                    let x = -1.0 + 0.25 * i as f64;
                    let got = table.derivative(order, x);
                    let want = oracle(degree, order, x);
                    let scale = want.abs().max(table.at_one(order) * 1e-6);
                    assert!(
                        (got - want).abs() <= tol * scale,
                        "N={degree} j={order} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn signed_log_path_agrees_with_native() {
        let table = LegendreTable::new(100);
        let cols = table.derivative_columns(0.7);
        let scols = table.derivative_columns_signed(0.7);
        for j in 0..=100 {
            let want = cols[j];
            let got = scols[j].value();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1e-280),
                "j={j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn high_degree_ratios_stay_in_unit_range() {
        // |L_N^(j)(x)| <= L_N^(j)(1) on [-1, 1]; check as ratios at N = 256.
        let table = LegendreTable::new(256);
        for &x in &[-0.95, -0.3, 0.0, 0.5, 0.99] {
            let cols = table.derivative_columns_signed(x);
            for j in (0..=256).step_by(16) {
                let ratio = cols[j].ln_abs - table.ln_at_one(j);
                assert!(ratio <= 1e-9, "N=256 j={j} x={x}: ln ratio {ratio}");
            }
        }
    }

    #[test]
    fn derivative_order_above_degree_vanishes() {
        assert_eq!(legendre_derivative(4, 7, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(legendre_derivative(4, 1, 1.5).is_err());
        assert!(legendre_derivative(-2, 0, 0.0).is_err());
    }

    #[test]
    fn finite_difference_links_consecutive_orders() {
        let table = LegendreTable::new(12);
        let h = 1e-5;
        for j in 0..4 {
            for &x in &[-0.6, 0.1, 0.8] {
                let fd = (table.derivative(j, x + h) - table.derivative(j, x - h)) / (2.0 * h);
                let exact = table.derivative(j + 1, x);
                assert!(
                    (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                    "j={j} x={x}"
                );
            }
        }
    }
}
