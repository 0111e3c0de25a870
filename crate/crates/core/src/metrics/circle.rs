//! Circle scans: sign changes, maxima, and argument profiles.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::{C64, NodalError, Result};

const INVPHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `g` on `[a, b]`, assuming the maximum's
/// basin is bracketed. Returns the best value seen.
fn golden_max(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..90 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INVPHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INVPHI * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

fn wrap_to_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Number of sign changes of `f` around the circle of radius `r` about
/// `center`.
///
/// Samples at `16 * max(hint_degree, 8)` angles, nudges any sample landing
/// exactly on a zero, and bisects each bracketed crossing to angular width
/// 1e-10 so that suspiciously close crossing pairs can be reported. The count
/// is taken cyclically, so it is always even.
pub fn sign_changes_on_circle(
    f: impl Fn(C64) -> f64,
    center: C64,
    r: f64,
    hint_degree: usize,
) -> Result<usize> {
    let m = 16 * hint_degree.max(8);
    let step = 2.0 * PI / m as f64;
    let mut angles = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for k in 0..m {
        let mut theta = k as f64 * step;
        let mut v = f(center + C64::new(r * theta.cos(), r * theta.sin()));
        let mut nudges = 0;
        while v == 0.0 {
            nudges += 1;
            if nudges > 8 {
                return Err(NodalError::Degenerate(format!(
                    "field vanishes at every nudge of angle {:.6}; \
                     cannot classify its sign",
                    k as f64 * step
                )));
            }
            theta = k as f64 * step + step * 1e-3 * nudges as f64;
            v = f(center + C64::new(r * theta.cos(), r * theta.sin()));
        }
        angles.push(theta);
        values.push(v);
    }

    let mut crossings = Vec::new();
    for k in 0..m {
        let k1 = (k + 1) % m;
        if values[k].signum() == values[k1].signum() {
            continue;
        }
        // Bisect the bracket; the wrap-around one extends past 2 pi, which
        // the evaluator handles by periodicity.
        let mut lo = angles[k];
        let mut hi = if k1 == 0 {
            angles[k1] + 2.0 * PI
        } else {
            angles[k1]
        };
        let mut flo = values[k];
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            let fm = f(center + C64::new(r * mid.cos(), r * mid.sin()));
            if fm == 0.0 || fm.signum() == flo.signum() {
                lo = mid;
                if fm != 0.0 {
                    flo = fm;
                }
            } else {
                hi = mid;
            }
        }
        crossings.push(0.5 * (lo + hi));
    }

    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in crossings.windows(2) {
        if w[1] - w[0] < 1e-9 {
            log::warn!(
                "sign crossings at {:.12} and {:.12} are closer than 1e-9 rad; \
                 counting both (near-tangency?)",
                w[0],
                w[1]
            );
        }
    }

    debug_assert!(crossings.len() % 2 == 0);
    Ok(crossings.len())
}

/// Count of nodal-set intersections with the circle of radius `r` about `x`,
/// measured as the number of sign changes of `f` along that circle.
pub fn nodal_intersections(
    f: impl Fn(C64) -> f64,
    x: C64,
    r: f64,
    hint_degree: usize,
) -> Result<usize> {
    sign_changes_on_circle(f, x, r, hint_degree)
}

/// Maximum of `|f|` on the circle of radius `r` about `center`: a dense scan
/// followed by a golden-section polish around the best sample.
pub fn max_on_circle(f: impl Fn(C64) -> f64, center: C64, r: f64) -> f64 {
    let g = |theta: f64| f(center + C64::new(r * theta.cos(), r * theta.sin())).abs();
    let m = 8192;
    let step = 2.0 * PI / m as f64;
    let mut best = 0.0f64;
    let mut best_k = 0;
    for k in 0..m {
        let v = g(k as f64 * step);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let t = best_k as f64 * step;
    best.max(golden_max(t - step, t + step, g))
}

/// Unwrapped phase samples of an analytic field along a circle, with the
/// angles covering one full revolution endpoint-inclusive.
#[derive(Clone, Debug)]
pub struct ArgProfile {
    /// Sample angles, strictly increasing from 0 to 2 pi inclusive.
    pub angles: Vec<f64>,
    /// Continuous lift of arg f at the sample angles.
    pub phases: Vec<f64>,
}

/// Sliding-window maximum of `ext(j) - ext(i)` over `j in [i, i + window]`
/// with start points `i` covering one revolution (`0..m`). Returns the best
/// increment and its index pair.
fn arc_scan(
    ext: &impl Fn(usize) -> f64,
    m: usize,
    window: usize,
) -> (f64, Option<(usize, usize)>) {
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    let mut best_pair = None;
    for j in 0..m + window {
        let v = ext(j);
        while let Some(&back) = deque.back() {
            if ext(back) <= v {
                deque.pop_back();
            } else {
                break;
            }
        }
        deque.push_back(j);
        if j >= window {
            let i = j - window;
            while let Some(&front) = deque.front() {
                if front < i {
                    deque.pop_front();
                } else {
                    break;
                }
            }
            let front = *deque.front().unwrap();
            let cand = ext(front) - ext(i);
            if cand > best {
                best = cand;
                best_pair = Some((i, front));
            }
        }
    }
    (best, best_pair)
}

/// Best increment `phases[j] - phases[i]` over arcs of at most one full
/// circumference, scanning start points over one revolution and extending
/// the lift by `full_turn` past the seam. Also returns the best pair whose
/// arc is strictly shorter than a full turn by at least two steps; only
/// those are safe to polish without the arc overrunning one circumference.
fn best_arc_increment(phases: &[f64], full_turn: f64) -> (f64, Option<(usize, usize)>) {
    let m = phases.len() - 1;
    let ext = |k: usize| {
        if k <= m {
            phases[k]
        } else {
            phases[k - m] + full_turn
        }
    };
    let (raw, _) = arc_scan(&ext, m, m);
    let best = raw.max(full_turn).max(0.0);
    let interior_pair = if m >= 3 {
        arc_scan(&ext, m, m - 2).1
    } else {
        None
    };
    (best, interior_pair)
}

impl ArgProfile {
    /// Net winding number over the full circle.
    pub fn winding(&self) -> Result<i64> {
        let total = self.phases[self.phases.len() - 1] - self.phases[0];
        let w = (total / (2.0 * PI)).round();
        if (total - 2.0 * PI * w).abs() > 1e-6 {
            return Err(NodalError::Degenerate(format!(
                "phase lift fails to close: total increment {total:.9} \
                 is not an integer multiple of 2 pi"
            )));
        }
        Ok(w as i64)
    }

    /// Largest phase increment over any sampled arc of up to one full
    /// circumference, the full circle included.
    pub fn max_increment(&self) -> Result<f64> {
        let w = self.winding()?;
        Ok(best_arc_increment(&self.phases, 2.0 * PI * w as f64).0)
    }
}

/// Samples arg f along the circle and unwraps it, doubling the sampling
/// density until every phase step is below pi/2.
pub fn arg_profile(
    f: impl Fn(C64) -> C64,
    center: C64,
    r: f64,
    hint_degree: usize,
) -> Result<ArgProfile> {
    let mut m = (16 * hint_degree.max(8)).max(256);
    loop {
        let step = 2.0 * PI / m as f64;
        let mut values = Vec::with_capacity(m + 1);
        for k in 0..m {
            let theta = k as f64 * step;
            values.push(f(center + C64::new(r * theta.cos(), r * theta.sin())));
        }
        values.push(values[0]);

        let max_abs = values.iter().map(|w| w.norm()).fold(0.0, f64::max);
        if let Some((k, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| w.norm() <= 1e-12 * max_abs)
        {
            return Err(NodalError::Precondition(format!(
                "field is numerically zero on the circle at angle {:.9} \
                 (|f| = {:.3e}, circle max {:.3e})",
                k as f64 * step,
                w.norm(),
                max_abs
            )));
        }

        let args: Vec<f64> = values.iter().map(|w| w.arg()).collect();
        let mut steps_ok = true;
        let mut phases = Vec::with_capacity(m + 1);
        phases.push(args[0]);
        for k in 0..m {
            let d = wrap_to_pi(args[k + 1] - args[k]);
            if d.abs() >= PI / 2.0 {
                steps_ok = false;
                break;
            }
            phases.push(phases[k] + d);
        }
        if steps_ok {
            let angles = (0..=m).map(|k| k as f64 * step).collect();
            return Ok(ArgProfile { angles, phases });
        }
        m *= 2;
        if m > (1 << 22) {
            return Err(NodalError::NoConvergence {
                context: "phase unwrapping: steps stay above pi/2".into(),
                iterations: 22,
            });
        }
    }
}

/// The argument oscillation: the largest increment of arg f over any arc of
/// the circle of radius `r` about `center`, the full circumference included.
///
/// The discrete profile underestimates interior optima by O(step), so when
/// the best arc is shorter than a full turn both of its endpoints get a
/// golden-section polish on a locally lifted phase.
pub fn arg_oscillation(
    f: impl Fn(C64) -> C64,
    center: C64,
    r: f64,
    hint_degree: usize,
) -> Result<f64> {
    let profile = arg_profile(&f, center, r, hint_degree)?;
    let w = profile.winding()?;
    let full_turn = 2.0 * PI * w as f64;
    let (best, interior_pair) = best_arc_increment(&profile.phases, full_turn);

    let Some((i, j)) = interior_pair else {
        return Ok(best);
    };

    let m = profile.phases.len() - 1;
    let step = 2.0 * PI / m as f64;
    let at = |k: usize| {
        if k <= m {
            (profile.angles[k], profile.phases[k])
        } else {
            (
                profile.angles[k - m] + 2.0 * PI,
                profile.phases[k - m] + full_turn,
            )
        }
    };
    // Local lift: anchored at a sample, valid within one step on either side
    // because the accepted profile has phase steps below pi/2.
    let lifted = |theta: f64, (anchor_theta, anchor_phase): (f64, f64)| {
        let wv = f(center + C64::new(r * theta.cos(), r * theta.sin()));
        let wa = f(center + C64::new(r * anchor_theta.cos(), r * anchor_theta.sin()));
        anchor_phase + wrap_to_pi(wv.arg() - wa.arg())
    };
    let (tj, _) = at(j);
    let (ti, _) = at(i);
    let end_max = golden_max(tj - step, tj + step, |t| lifted(t, at(j)));
    let start_min = -golden_max(ti - step, ti + step, |t| -lifted(t, at(i)));
    Ok(best.max(end_max - start_min))
}

/// Number of zeros of `f` strictly inside the circle, counted with
/// multiplicity, via the winding number of the boundary phase.
pub fn zero_count(
    f: impl Fn(C64) -> C64,
    center: C64,
    r: f64,
    hint_degree: usize,
) -> Result<i64> {
    arg_profile(f, center, r, hint_degree)?.winding()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn origin() -> C64 {
        C64::new(0.0, 0.0)
    }

    #[test]
    fn sign_changes_of_re_z_cubed() {
        let nu = sign_changes_on_circle(|z| (z * z * z).re, origin(), 1.0, 3).unwrap();
        assert_eq!(nu, 6);
    }

    #[test]
    fn sign_changes_of_re_z_small_circle() {
        let nu = sign_changes_on_circle(|z| z.re, origin(), 0.5, 1).unwrap();
        assert_eq!(nu, 2);
    }

    #[test]
    fn sign_changes_match_dense_scan_for_random_harmonic_polynomial() {
        let mut rng = crate::util::task_rng(0x5eed_c1c1e, 0);
        let degree = 12usize;
        let coeffs: Vec<(f64, f64)> = (0..degree)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let u = |z: C64| {
            let mut p = C64::new(1.0, 0.0);
            let mut acc = 0.0;
            for &(a, b) in &coeffs {
                p *= z;
                acc += a * p.re + b * p.im;
            }
            acc
        };

        // Independent dense scan: one million cyclic samples, no refinement.
        let m = 1_000_000usize;
        let mut dense = 0usize;
        let mut prev = u(C64::new(1.0, 0.0)).signum();
        let first = prev;
        for k in 1..m {
            let t = 2.0 * PI * k as f64 / m as f64;
            let s = u(C64::new(t.cos(), t.sin())).signum();
            if s != prev {
                dense += 1;
            }
            prev = s;
        }
        if first != prev {
            dense += 1;
        }

        let nu = sign_changes_on_circle(u, origin(), 1.0, degree).unwrap();
        assert_eq!(nu, dense);
        assert_eq!(nu % 2, 0);
    }

    #[test]
    fn max_on_circle_of_re_z_pow() {
        let m = max_on_circle(|z| z.powi(5).re, origin(), 0.7);
        let want = 0.7f64.powi(5);
        assert!((m - want).abs() <= 1e-8 * want);
        assert!((max_on_circle(|_| 1.0, origin(), 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn max_on_circle_of_quadratic_combination() {
        // Re(z + z^2) on the unit circle peaks at z = 1 with value 2.
        let f = |z: C64| (z + z * z).re;
        let m = max_on_circle(f, origin(), 1.0);
        assert!((m - 2.0).abs() <= 1e-8 * 2.0);

        // Dense-scan cross-check at an incommensurate sample count.
        let mut dense = 0.0f64;
        for k in 0..999_983 {
            let t = 2.0 * PI * k as f64 / 999_983.0;
            dense = dense.max(f(C64::new(t.cos(), t.sin())).abs());
        }
        assert!(m >= dense - 1e-12);
        assert!((m - dense).abs() <= 1e-8);
    }

    #[test]
    fn arg_oscillation_of_pure_powers() {
        for n in 1..=6 {
            let omega = arg_oscillation(|z| z.powi(n), origin(), 0.8, n as usize).unwrap();
            assert!(
                (omega - 2.0 * PI * n as f64).abs() < 1e-9,
                "n={n}: {omega}"
            );
        }
    }

    #[test]
    fn arg_oscillation_of_shifted_identity() {
        // arg(z + 2) on the unit circle ranges over [-pi/6, pi/6], so the
        // best arc climbs the full pi/3.
        let omega = arg_oscillation(|z| z + 2.0, origin(), 1.0, 1).unwrap();
        assert!((omega - PI / 3.0).abs() < 1e-9, "{omega}");
    }

    #[test]
    fn arg_oscillation_exceeds_winding_for_wiggly_unit() {
        // f = z^3 * e^{0.7 z}: zero-free factor, so the full turn gives 6 pi
        // and phase wiggles can only add.
        let f = |z: C64| z.powi(3) * (z * 0.7).exp();
        let omega = arg_oscillation(f, origin(), 1.0, 3).unwrap();
        assert!(omega >= 6.0 * PI - 1e-10, "{omega}");
    }

    #[test]
    fn zero_count_of_pure_power() {
        assert_eq!(zero_count(|z| z.powi(5), origin(), 1.0, 5).unwrap(), 5);
    }

    #[test]
    fn zero_count_of_cubic_with_outside_root() {
        let f = |z: C64| (z - 0.3) * (z - 0.9) * (z + 2.0);
        assert_eq!(zero_count(f, origin(), 1.0, 3).unwrap(), 2);
    }

    #[test]
    fn zero_count_of_perturbed_powers() {
        // z^n times a zero-free factor exp(p(z)) keeps exactly n zeros inside,
        // and the oscillation stays at least the pure winding.
        let mut rng = crate::util::task_rng(77, 3);
        for n in 1..=5 {
            let a = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let b = C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            let f = move |z: C64| z.powi(n) * (a * z + b * z * z).exp();
            assert_eq!(zero_count(f, origin(), 1.0, n as usize).unwrap(), n as i64);
            let omega = arg_oscillation(f, origin(), 1.0, n as usize).unwrap();
            assert!(omega >= 2.0 * PI * n as f64 - 1e-10);
        }
    }

    #[test]
    fn zero_on_circle_is_rejected() {
        let err = zero_count(|z| z - 1.0, origin(), 1.0, 1).unwrap_err();
        assert!(matches!(err, NodalError::Precondition(_)));
    }

    #[test]
    fn profile_closes_to_integer_winding() {
        let profile = arg_profile(|z| z.powi(4), origin(), 1.3, 4).unwrap();
        let total = profile.phases.last().unwrap() - profile.phases[0];
        assert!((total - 8.0 * PI).abs() < 1e-10);
        assert_eq!(profile.winding().unwrap(), 4);
        for pair in profile.phases.windows(2) {
            assert!((pair[1] - pair[0]).abs() < PI / 2.0);
        }
    }
}
