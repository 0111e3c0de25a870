//! Taylor coefficients by FFT on circles, a bucket of orders per circle.
//!
//! For an entire function of double-exponential growth the coefficient of
//! order `n` is only well conditioned on circles near its saddle radius,
//! where that term is the largest mode of the restriction. Extracting a
//! small bucket of consecutive orders per circle keeps every target mode
//! within a hair of the circle maximum, so the trapezoidal rule loses
//! nothing to scale spread.

use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::field::ScaledComplex;
use crate::{C64, NodalError, Result};

/// Coefficients `a_0 ..= a_max` of `f` about `center`. `radius_for(n)` picks
/// the circle for the bucket containing order `n`; `bucket` consecutive
/// orders share one FFT.
pub fn taylor_coefficients<F>(
    f: F,
    center: C64,
    radius_for: impl Fn(usize) -> f64,
    n_max: usize,
    bucket: usize,
) -> Result<Vec<ScaledComplex>>
where
    F: Fn(C64) -> ScaledComplex + Sync,
{
    taylor_coefficients_oversampled(f, center, radius_for, n_max, bucket, 1)
}

/// Same extraction with `oversample`-times denser circles; agreement with the
/// base density certifies that aliasing is negligible.
pub fn taylor_coefficients_oversampled<F>(
    f: F,
    center: C64,
    radius_for: impl Fn(usize) -> f64,
    n_max: usize,
    bucket: usize,
    oversample: usize,
) -> Result<Vec<ScaledComplex>>
where
    F: Fn(C64) -> ScaledComplex + Sync,
{
    if bucket == 0 || oversample == 0 {
        return Err(NodalError::Precondition(
            "bucket size and oversampling factor must be positive".into(),
        ));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut n_lo = 0usize;
    while n_lo <= n_max {
        let n_hi = (n_lo + bucket - 1).min(n_max);
        let rho = radius_for((n_lo + n_hi) / 2);
        if !(rho.is_finite() && rho > 0.0) {
            return Err(NodalError::Precondition(format!(
                "circle radius {rho} for orders {n_lo}..={n_hi} is not usable"
            )));
        }
        // 4x oversampling puts the first alias of order n at n + 3 n_hi,
        // far outside the saddle's spectral bump.
        let m = (4 * oversample * n_hi.max(32)).next_power_of_two();
        let samples: Vec<ScaledComplex> = (0..m)
            .into_par_iter()
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / m as f64;
                f(center + C64::new(rho * theta.cos(), rho * theta.sin()))
            })
            .collect();
        let max_ln = samples
            .iter()
            .map(|s| s.log_magnitude)
            .fold(f64::NEG_INFINITY, f64::max);
        if !max_ln.is_finite() {
            return Err(NodalError::Degenerate(format!(
                "function vanishes identically on the radius-{rho} circle"
            )));
        }
        let mut buffer: Vec<C64> = samples
            .iter()
            .map(|s| {
                if s.is_zero() {
                    C64::new(0.0, 0.0)
                } else {
                    let mag = (s.log_magnitude - max_ln).exp();
                    C64::new(mag * s.phase.cos(), mag * s.phase.sin())
                }
            })
            .collect();
        planner.plan_fft_forward(m).process(&mut buffer);
        let ln_rho = rho.ln();
        let ln_m = (m as f64).ln();
        for n in n_lo..=n_hi {
            let x = buffer[n];
            out.push(ScaledComplex::new(
                x.norm().ln() + max_ln - ln_m - n as f64 * ln_rho,
                x.arg(),
            ));
        }
        n_lo = n_hi + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::ln_factorial;

    #[test]
    fn exponential_series_recovered() {
        // exp has a_n = 1/n!; its saddle radius for order n is n itself.
        let coeffs = taylor_coefficients(
            |z: C64| ScaledComplex::new(z.re, z.im),
            C64::new(0.0, 0.0),
            |n| (n.max(4)) as f64,
            50,
            16,
        )
        .unwrap();
        for (n, a) in coeffs.iter().enumerate() {
            let rel = (a.log_magnitude + ln_factorial(n)).abs();
            assert!(rel < 1e-10, "order {n}: ln|a_n| + ln n! = {rel}");
            let phase = a.phase.abs().min((a.phase.abs() - 2.0 * PI).abs());
            assert!(phase < 1e-10, "order {n}: phase {}", a.phase);
        }
    }

    #[test]
    fn cubic_polynomial_exact() {
        let f = |z: C64| ScaledComplex::from_c64((1.0 + z) * (1.0 + z) * (1.0 + z));
        let coeffs =
            taylor_coefficients(f, C64::new(0.0, 0.0), |_| 1.0, 6, 16).unwrap();
        let want = [1.0, 3.0, 3.0, 1.0, 0.0, 0.0, 0.0];
        for (n, (a, w)) in coeffs.iter().zip(want).enumerate() {
            let v = a.to_c64();
            assert!((v.re - w).abs() < 1e-12 && v.im.abs() < 1e-12, "order {n}: {v}");
        }
    }

    #[test]
    fn shifted_center_series() {
        // f(z) = z^2 about center 2: coefficients 4, 4, 1.
        let f = |z: C64| ScaledComplex::from_c64(z * z);
        let coeffs =
            taylor_coefficients(f, C64::new(2.0, 0.0), |_| 1.5, 4, 16).unwrap();
        let want = [4.0, 4.0, 1.0, 0.0, 0.0];
        for (n, (a, w)) in coeffs.iter().zip(want).enumerate() {
            let v = a.to_c64();
            assert!((v - C64::new(w, 0.0)).norm() < 1e-11, "order {n}: {v}");
        }
    }
}
