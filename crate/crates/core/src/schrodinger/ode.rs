//! Log-convexity for the abstract equation `ḧ = L(t) h`.
//!
//! When `L(t)` is symmetric positive semidefinite and non-decreasing,
//! every solution started in the decaying regime has `log(‖h‖²/2)` convex
//! in `t`. The discrete check integrates the system with classical RK4
//! from `t = -T`, starting on the slow manifold (`ḣ = L^{1/2} h`, which
//! makes `(Lh, h) - ‖ḣ‖² = 0` at the initial time and hence nonnegative
//! forever), then measures the worst negated second difference of the
//! recorded log-energies. For an exact solution this is `≥ 0` up to
//! integration error, so any sizeable negative dip falsifies the setup.
//!
//! Solutions grow like `e^{σ t}` with `σ² = ‖L‖`; for long horizons the
//! state is renormalised whenever it leaves a safe numeric range and the
//! discarded factor is re-added in log space, so overflow never occurs.

use nalgebra::{DMatrix, DVector};

use crate::error::{NodalError, Result};

const DEFAULT_STEPS: usize = 4000;
// Largest entry before renormalising. Kept far below sqrt(f64::MAX) so
// that norms of the state (sums of squared entries) never overflow.
const RESCALE_LIMIT: f64 = 1e100;

fn symmetric_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = m.nrows();
    let eigen = m.clone().symmetric_eigen();
    let scale = eigen.eigenvalues.amax().max(1.0);
    let mut roots = DVector::zeros(dim);
    for (slot, &lambda) in roots.iter_mut().zip(eigen.eigenvalues.iter()) {
        if lambda < -1e-10 * scale {
            return Err(NodalError::Precondition(format!(
                "operator has a negative eigenvalue {lambda}"
            )));
        }
        *slot = lambda.max(0.0).sqrt();
    }
    let q = &eigen.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

fn check_symmetric(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(NodalError::Precondition(format!("{name} is not square")));
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(NodalError::Precondition(format!(
                    "{name} is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Worst negated second difference of `log(‖h‖²/2)` along the trajectory.
///
/// `l` must produce symmetric PSD matrices that are non-decreasing in `t`
/// on `[-horizon, 0]`; only the initial operator is validated, the rest is
/// the caller's contract. The trajectory starts at `h(-horizon) = init·v`,
/// `ḣ(-horizon) = init·L^{1/2} v` with `v` the normalised all-ones vector.
pub fn ode_convexity_violation(
    l: impl Fn(f64) -> DMatrix<f64>,
    horizon: f64,
    init: f64,
    steps: usize,
) -> Result<f64> {
    if !(horizon > 0.0) || !(init > 0.0) {
        return Err(NodalError::Precondition(format!(
            "horizon and initial size must be positive, got {horizon}, {init}"
        )));
    }
    if steps < 16 {
        return Err(NodalError::Precondition(format!(
            "too few integration steps: {steps}"
        )));
    }
    let l_start = l(-horizon);
    check_symmetric(&l_start, "the initial operator")?;
    let dim = l_start.nrows();
    let root = symmetric_sqrt(&l_start)?;

    let v = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    let mut h = &v * init;
    let mut hd = root * &v * init;

    let dt = horizon / steps as f64;
    let mut log_offset = 0.0;
    let mut logs = Vec::with_capacity(steps + 1);
    logs.push(2.0 * (log_offset + h.norm().ln()) - std::f64::consts::LN_2);

    let mut l_here = l_start;
    for step in 0..steps {
        let t = -horizon + step as f64 * dt;
        let l_mid = l(t + 0.5 * dt);
        let l_next = l(t + dt);

        let k1h = hd.clone();
        let k1d = &l_here * &h;
        let k2h = &hd + &k1d * (0.5 * dt);
        let k2d = &l_mid * (&h + &k1h * (0.5 * dt));
        let k3h = &hd + &k2d * (0.5 * dt);
        let k3d = &l_mid * (&h + &k2h * (0.5 * dt));
        let k4h = &hd + &k3d * dt;
        let k4d = &l_next * (&h + &k3h * dt);

        h += (k1h + &k2h * 2.0 + &k3h * 2.0 + k4h) * (dt / 6.0);
        hd += (k1d + &k2d * 2.0 + &k3d * 2.0 + k4d) * (dt / 6.0);
        l_here = l_next;

        let size = h.amax().max(hd.amax());
        if size > RESCALE_LIMIT {
            h /= size;
            hd /= size;
            log_offset += size.ln();
        }
        let norm = h.norm();
        if norm == 0.0 {
            return Err(NodalError::Degenerate(
                "trajectory collapsed to zero".into(),
            ));
        }
        logs.push(2.0 * (log_offset + norm.ln()) - std::f64::consts::LN_2);
    }

    let mut worst = f64::NEG_INFINITY;
    for k in 1..logs.len() - 1 {
        worst = worst.max(-(logs[k + 1] - 2.0 * logs[k] + logs[k - 1]));
    }
    Ok(worst)
}

/// Convexity violation for the linear-in-time family
/// `L(t) = L₀ + (t + T) L₁` on `[-T, 0]`, the smallest setting where both
/// monotonicity and the initial-slope cancellation matter.
///
/// Both matrices must be symmetric PSD so that `L ⪰ 0` and `L̇ = L₁ ⪰ 0`
/// hold on the whole interval.
pub fn toy_ode_convexity(
    l0: &DMatrix<f64>,
    l1: &DMatrix<f64>,
    horizon: f64,
    init: f64,
) -> Result<f64> {
    check_symmetric(l0, "the base operator")?;
    check_symmetric(l1, "the growth operator")?;
    if l0.nrows() != l1.nrows() {
        return Err(NodalError::Precondition(format!(
            "operator sizes differ: {} vs {}",
            l0.nrows(),
            l1.nrows()
        )));
    }
    symmetric_sqrt(l0)?;
    symmetric_sqrt(l1)?;
    let family = |t: f64| l0 + l1 * (t + horizon);
    ode_convexity_violation(family, horizon, init, DEFAULT_STEPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::task_rng;
    use rand::Rng;

    #[test]
    fn constant_scalar_operator_is_exactly_log_linear() {
        // h(t) = eps e^{t+T}: RK4 preserves the eigenvector, so the log
        // stays linear to machine precision (not just O(dt^4)).
        let l0 = DMatrix::from_element(1, 1, 1.0);
        let l1 = DMatrix::zeros(1, 1);
        let v = toy_ode_convexity(&l0, &l1, 4.0, 1e-3).unwrap();
        assert!(v.abs() < 1e-12, "violation {v}");
    }

    #[test]
    fn growing_scalar_family_stays_convex() {
        let l0 = DMatrix::from_element(1, 1, 0.5);
        let l1 = DMatrix::from_element(1, 1, 2.0);
        let v = toy_ode_convexity(&l0, &l1, 4.0, 1e-3).unwrap();
        assert!(v < 1e-9, "violation {v}");
    }

    #[test]
    fn exponential_rate_needs_the_general_form() {
        // L(t) = e^{2t} admits the explicit solution h = exp(e^t) when
        // started on the slow manifold; convexity must survive it.
        let family = |t: f64| DMatrix::from_element(1, 1, (2.0 * t).exp());
        let coarse = ode_convexity_violation(family, 6.0, 1e-3, 2000).unwrap();
        let fine = ode_convexity_violation(family, 6.0, 1e-3, 4000).unwrap();
        assert!(coarse < 1e-8, "coarse violation {coarse}");
        assert!(fine < 1e-8, "fine violation {fine}");
        assert!(fine <= coarse.max(1e-13), "refinement made it worse: {fine} vs {coarse}");
    }

    #[test]
    fn long_horizons_survive_renormalisation() {
        // Growth e^{5t} over t in [-160, 0] overflows f64 without the
        // running log offset.
        let l0 = DMatrix::from_element(1, 1, 25.0);
        let l1 = DMatrix::zeros(1, 1);
        let v = toy_ode_convexity(&l0, &l1, 160.0, 1e-3).unwrap();
        assert!(v.is_finite() && v < 1e-9, "violation {v}");
    }

    fn random_psd(seed: u64, index: u64, dim: usize) -> DMatrix<f64> {
        let mut rng = task_rng(seed, index);
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        &a * a.transpose() / dim as f64
    }

    #[test]
    fn random_psd_pairs_stay_convex() {
        for seed in 0..3u64 {
            let l0 = random_psd(seed, 0, 8);
            let l1 = random_psd(seed, 1, 8);
            let v = toy_ode_convexity(&l0, &l1, 4.0, 1e-3).unwrap();
            assert!(v < 1e-7, "seed {seed}: violation {v}");
        }
    }

    #[test]
    fn invalid_operators_are_rejected() {
        let l0 = DMatrix::from_element(1, 1, -1.0);
        let l1 = DMatrix::zeros(1, 1);
        assert!(toy_ode_convexity(&l0, &l1, 4.0, 1e-3).is_err());

        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let z2 = DMatrix::zeros(2, 2);
        assert!(toy_ode_convexity(&skew, &z2, 4.0, 1e-3).is_err());

        let mismatched = DMatrix::zeros(3, 3);
        assert!(toy_ode_convexity(&z2, &mismatched, 4.0, 1e-3).is_err());

        let ok = DMatrix::from_element(1, 1, 1.0);
        let z1 = DMatrix::zeros(1, 1);
        assert!(toy_ode_convexity(&ok, &z1, -1.0, 1e-3).is_err());
        assert!(toy_ode_convexity(&ok, &z1, 4.0, 0.0).is_err());
        assert!(ode_convexity_violation(|_| ok.clone(), 4.0, 1e-3, 8).is_err());
    }
}
