//! Multi-start simplex minimisation of the positivity area.
//!
//! The objective is scale-invariant (coefficients are normalised before
//! every evaluation) and infeasible points cost the full disc area, so the
//! search stays inside the class by rejection. Restarts run in parallel,
//! each with its own RNG substream, and the winner is reduced
//! deterministically with ties broken by restart index; together with the
//! deterministic grid-refined area this makes the whole estimate
//! reproducible bit for bit regardless of thread count.

use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::{canonical_class, warm_start, Candidate, EstimateRecord, ESTIMATE_CAVEAT};
use crate::error::{NodalError, Result};
use crate::extremal::ExtremalPolynomial;
use crate::metrics::{positivity_area, sign_changes_on_circle, AreaMethod, Disc};
use crate::util::task_rng;
use crate::C64;

/// Search budgets. The evaluation budget is shared across restarts.
#[derive(Clone, Debug)]
pub struct MinimizeConfig {
    pub restarts: usize,
    pub max_evals: usize,
    pub area_budget: usize,
    pub seed: u64,
    /// Extra starting coefficient sets, e.g. the previous class optimum or
    /// a construction polynomial; `Re z` and `Re z^{d/2}` are always added.
    pub warm_starts: Vec<Vec<(f64, f64)>>,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_evals: 50_000,
            area_budget: 20_000,
            seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

fn evaluate_flat(x: &[f64], scale: f64, z: C64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for pair in x.chunks_exact(2).rev() {
        acc = (acc + C64::new(pair[0] / scale, -pair[1] / scale)) * z;
    }
    acc.re
}

/// Area of the positive set if the point is feasible for the class,
/// otherwise the whole disc area.
fn objective(x: &[f64], class: usize, area_budget: usize) -> f64 {
    let mut scale = 0.0f64;
    for &v in x {
        if !v.is_finite() {
            return PI;
        }
        scale = scale.max(v.abs());
    }
    if scale == 0.0 {
        return PI;
    }
    let eval = |z: C64| evaluate_flat(x, scale, z);
    match sign_changes_on_circle(eval, C64::new(0.0, 0.0), 1.0, class) {
        Ok(nu) if nu <= class => {}
        _ => return PI,
    }
    match positivity_area(eval, &Disc::unit(), area_budget, AreaMethod::GridRefined) {
        Ok(estimate) => estimate.value,
        Err(_) => PI,
    }
}

fn normalise(x: &mut [f64]) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale > 0.0 {
        for v in x.iter_mut() {
            *v /= scale;
        }
    }
}

/// One simplex descent from `base`, spending at most `max_evals`
/// evaluations. Returns the best point, its value, and the spend.
fn simplex_descent(
    f: &impl Fn(&[f64]) -> f64,
    base: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let dims = base.len();
    let evals = std::cell::Cell::new(0usize);
    let spend = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    if max_evals < dims + 2 {
        let v = spend(base);
        return (base.to_vec(), v, evals.get());
    }

    let mut points = Vec::with_capacity(dims + 1);
    let mut values = Vec::with_capacity(dims + 1);
    points.push(base.to_vec());
    values.push(spend(base));
    for i in 0..dims {
        let mut p = base.to_vec();
        p[i] += 0.1;
        values.push(spend(&p));
        points.push(p);
    }

    while evals.get() < max_evals {
        // Order: best first, worst last, ties by index for determinism.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let second_worst = order[dims - 1];
        let worst = order[dims];

        if values[worst] - values[best] < 1e-12 * (1.0 + values[best].abs()) {
            break;
        }

        let mut centroid = vec![0.0; dims];
        for &idx in &order[..dims] {
            for (c, &v) in centroid.iter_mut().zip(&points[idx]) {
                *c += v;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dims as f64;
        }

        let shifted = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[worst])
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let reflected = shifted(1.0);
        let f_r = spend(&reflected);
        if f_r < values[best] {
            let expanded = shifted(2.0);
            let f_e = spend(&expanded);
            if f_e < f_r {
                points[worst] = expanded;
                values[worst] = f_e;
            } else {
                points[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            points[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        let contracted = if f_r < values[worst] {
            shifted(0.5)
        } else {
            shifted(-0.5)
        };
        let f_c = spend(&contracted);
        if f_c < values[worst].min(f_r) {
            points[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        // Shrink towards the best vertex.
        let anchor = points[best].clone();
        for idx in 0..points.len() {
            if idx == best {
                continue;
            }
            for (v, &a) in points[idx].iter_mut().zip(&anchor) {
                *v = a + 0.5 * (*v - a);
            }
            values[idx] = spend(&points[idx]);
            if evals.get() >= max_evals {
                break;
            }
        }
    }

    let mut best_idx = 0;
    for i in 1..points.len() {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    (points.swap_remove(best_idx), values[best_idx], evals.get())
}

/// Smallest positivity area found in the class of `d`, as the measured
/// area of an explicit feasible certificate.
pub fn minimize_area(d: usize, config: &MinimizeConfig) -> Result<EstimateRecord> {
    let class = canonical_class(d);
    if class < 2 {
        return Err(NodalError::Precondition(format!(
            "classes start at (canonical) d = 2, got {d}"
        )));
    }
    if config.restarts == 0 || config.max_evals < config.restarts {
        return Err(NodalError::Precondition(format!(
            "budget too small: {} restarts, {} evaluations",
            config.restarts, config.max_evals
        )));
    }
    let dims = 2 * class;

    // Assemble starts: caller-provided, then the two always-feasible
    // monomials. Everything is padded to the class dimension and
    // normalised so that rescaled inputs run identically.
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for pairs in &config.warm_starts {
        if 2 * pairs.len() > dims {
            return Err(NodalError::Precondition(format!(
                "warm start has degree {} beyond the class {class}",
                pairs.len()
            )));
        }
        let mut flat = vec![0.0; dims];
        for (slot, &(p, q)) in pairs.iter().enumerate() {
            flat[2 * slot] = p;
            flat[2 * slot + 1] = q;
        }
        normalise(&mut flat);
        starts.push(flat);
    }
    let mut re_z = vec![0.0; dims];
    re_z[0] = 1.0;
    starts.push(re_z);
    let mut re_half = vec![0.0; dims];
    re_half[2 * (class / 2 - 1)] = 1.0;
    starts.push(re_half);

    let f = |x: &[f64]| objective(x, class, config.area_budget);

    // Each start is evaluated once; the best of these is the bound the
    // search has to beat, and a fallback certificate.
    let start_values: Vec<f64> = starts.par_iter().map(|s| f(s)).collect();
    let mut construction_bound = f64::INFINITY;
    for &v in &start_values {
        construction_bound = construction_bound.min(v);
    }
    if !(construction_bound < PI) {
        return Err(NodalError::Construction {
            message: "no feasible starting candidate".into(),
            retries: starts.len(),
        });
    }

    let per_restart = config.max_evals / config.restarts;
    let outcomes: Vec<(Vec<f64>, f64, usize)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut base = starts[r % starts.len()].clone();
            if r >= starts.len() {
                let mut rng = task_rng(config.seed, r as u64);
                for v in base.iter_mut() {
                    *v += 0.15 * rng.gen_range(-1.0..1.0);
                }
                normalise(&mut base);
            }
            simplex_descent(&f, &base, per_restart)
        })
        .collect();

    let mut evaluations = start_values.len();
    let mut best_x: Option<&[f64]> = None;
    let mut best_v = f64::INFINITY;
    for (x, v, used) in &outcomes {
        evaluations += used;
        if *v < best_v {
            best_v = *v;
            best_x = Some(x);
        }
    }
    // Fall back to the best raw start if no descent improved on it.
    let (winner, winner_value) = if best_v <= construction_bound {
        (best_x.expect("at least one restart").to_vec(), best_v)
    } else {
        let idx = start_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("starts are non-empty");
        (starts[idx].clone(), start_values[idx])
    };

    let pairs: Vec<(f64, f64)> = winner.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let best = Candidate::from_pairs(&pairs, config.area_budget)?;
    debug_assert!((best.area().value - winner_value).abs() < 1e-12);

    Ok(EstimateRecord {
        class: d,
        canonical_class: class,
        best,
        construction_bound,
        evaluations,
        restarts: config.restarts,
        area_budget: config.area_budget,
        seed: config.seed,
        caveat: ESTIMATE_CAVEAT,
    })
}

/// Estimates a whole ascending family of classes, seeding each class with
/// the previous optimum (so the reported areas never increase) and with
/// the best admissible construction polynomial.
pub fn chained_sweep(
    classes: &[usize],
    config: &MinimizeConfig,
    prepared: &[&ExtremalPolynomial],
) -> Result<Vec<EstimateRecord>> {
    for pair in classes.windows(2) {
        if canonical_class(pair[1]) <= canonical_class(pair[0]) {
            return Err(NodalError::Precondition(format!(
                "classes must strictly increase, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    let mut records = Vec::with_capacity(classes.len());
    let mut previous: Option<Vec<(f64, f64)>> = None;
    for &d in classes {
        let mut cfg = config.clone();
        if let Some(prev) = &previous {
            cfg.warm_starts.push(prev.clone());
        }
        let start = warm_start(d, prepared, config.area_budget)?;
        cfg.warm_starts.push(start.pairs().to_vec());
        let record = minimize_area(d, &cfg)?;
        previous = Some(record.best.pairs().to_vec());
        records.push(record);
    }
    Ok(records)
}
