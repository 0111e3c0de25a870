//! Estimating the smallest positivity area over sign-change classes.
//!
//! For even `d`, the class collects harmonic polynomials `u` vanishing at
//! the origin with at most `d` sign changes on the unit circle, and the
//! quantity of interest is the infimum of `Area({u > 0} ∩ 𝔻)`. The
//! estimator searches coefficient space with a multi-start simplex method,
//! warm-started from the entire-function construction (whose positive set
//! shrinks like `1/log N`) and from explicit monomials. Every reported
//! value is the measured area of a stored feasible certificate, and it is
//! an upper estimate: the search is restricted to trigonometric degree at
//! most `d`, while the class itself has no degree bound.

mod optimize;

pub use optimize::{chained_sweep, minimize_area, MinimizeConfig};

use serde_json::{json, Value};

use crate::error::{NodalError, Result};
use crate::extremal::ExtremalPolynomial;
use crate::metrics::{positivity_area, sign_changes_on_circle, AreaEstimate, AreaMethod, Disc};
use crate::util::fmt17;
use crate::C64;

/// Caveat attached to every estimate (the infimum might not be attained in
/// the searched coefficient range).
pub const ESTIMATE_CAVEAT: &str =
    "degree-restricted upper estimate; the class infimum may be lower";

/// Sign changes on a circle pair up, so odd classes coincide with the even
/// class below them.
pub fn canonical_class(d: usize) -> usize {
    d - d % 2
}

/// A harmonic polynomial `u(r e^{iθ}) = Σ_{n≥1} rⁿ(p_n cos nθ + q_n sin nθ)`
/// with its measured circle sign-change count and positivity area.
///
/// The constant term is structurally absent (`u(0) = 0`) and coefficients
/// are normalised so the largest magnitude is 1; neither the sign-change
/// count nor the positivity set is affected by positive rescaling.
#[derive(Clone, Debug)]
pub struct Candidate {
    pairs: Vec<(f64, f64)>,
    nu: usize,
    area: AreaEstimate,
}

impl Candidate {
    pub fn from_pairs(pairs: &[(f64, f64)], area_budget: usize) -> Result<Self> {
        let mut scale = 0.0f64;
        for &(p, q) in pairs {
            if !p.is_finite() || !q.is_finite() {
                return Err(NodalError::Precondition(
                    "candidate coefficients must be finite".into(),
                ));
            }
            scale = scale.max(p.abs()).max(q.abs());
        }
        if scale == 0.0 {
            return Err(NodalError::Degenerate(
                "the zero candidate has no sign changes or area".into(),
            ));
        }
        let pairs: Vec<(f64, f64)> = pairs
            .iter()
            .map(|&(p, q)| (p / scale, q / scale))
            .collect();
        let eval = |z: C64| evaluate_pairs(&pairs, z);
        let nu = sign_changes_on_circle(eval, C64::new(0.0, 0.0), 1.0, pairs.len())?;
        let area = positivity_area(eval, &Disc::unit(), area_budget, AreaMethod::GridRefined)?;
        Ok(Self { pairs, nu, area })
    }

    /// `u(z)`, evaluated by a complex Horner pass.
    pub fn evaluate(&self, z: C64) -> f64 {
        evaluate_pairs(&self.pairs, z)
    }

    /// Normalised coefficient pairs `(p_n, q_n)`, `n = 1..`.
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Measured sign changes of `u` on the unit circle.
    pub fn sign_changes(&self) -> usize {
        self.nu
    }

    pub fn area(&self) -> &AreaEstimate {
        &self.area
    }

    /// Re-measures the positivity area, e.g. with a doubled budget or a
    /// Monte Carlo cross-check, without touching the cached estimate.
    pub fn remeasure(&self, budget: usize, method: AreaMethod) -> Result<AreaEstimate> {
        positivity_area(
            |z| self.evaluate(z),
            &Disc::unit(),
            budget,
            method,
        )
    }
}

/// `u(z) = Re Σ (p_n - i q_n) zⁿ`, which expands to exactly the
/// `rⁿ(p_n cos nθ + q_n sin nθ)` sum.
fn evaluate_pairs(pairs: &[(f64, f64)], z: C64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(p, q) in pairs.iter().rev() {
        acc = (acc + C64::new(p, -q)) * z;
    }
    acc.re
}

/// Whether the candidate belongs to the class `d`: at most
/// `canonical_class(d)` sign changes on the unit circle.
pub fn feasibility(candidate: &Candidate, d: usize) -> bool {
    candidate.nu <= canonical_class(d)
}

/// Best stored start for class `d`: the real part of the largest prepared
/// construction polynomial whose degree and measured sign-change count both
/// fit the class, or `Re z^{d/2}` when none qualifies.
pub fn warm_start(
    d: usize,
    prepared: &[&ExtremalPolynomial],
    area_budget: usize,
) -> Result<Candidate> {
    let class = canonical_class(d);
    if class < 2 {
        return Err(NodalError::Precondition(format!(
            "classes start at (canonical) d = 2, got {d}"
        )));
    }
    let mut best: Option<&ExtremalPolynomial> = None;
    for poly in prepared {
        if poly.degree > class || best.is_some_and(|b| b.degree >= poly.degree) {
            continue;
        }
        let nu = match sign_changes_on_circle(
            |z| poly.real_part(z),
            C64::new(0.0, 0.0),
            1.0,
            poly.degree,
        ) {
            Ok(n) => n,
            Err(_) => continue,
        };
        if nu <= class {
            best = Some(poly);
        }
    }
    let pairs: Vec<(f64, f64)> = match best {
        Some(poly) => poly.coefficients[1..]
            .iter()
            .map(|c| (c.re, -c.im))
            .collect(),
        None => {
            let mut pairs = vec![(0.0, 0.0); class / 2];
            pairs[class / 2 - 1] = (1.0, 0.0);
            pairs
        }
    };
    Candidate::from_pairs(&pairs, area_budget)
}

/// Outcome of one class estimate: the certificate candidate, the areas of
/// the explicit starts it had to beat, and the budgets that produced it.
#[derive(Clone, Debug)]
pub struct EstimateRecord {
    pub class: usize,
    pub canonical_class: usize,
    pub best: Candidate,
    /// Smallest area among the evaluated starting candidates (always
    /// includes `Re z`, so this is at most the half-disc area).
    pub construction_bound: f64,
    /// Objective evaluations actually spent.
    pub evaluations: usize,
    pub restarts: usize,
    pub area_budget: usize,
    pub seed: u64,
    pub caveat: &'static str,
}

impl EstimateRecord {
    /// The estimate itself: the measured positivity area of the stored
    /// certificate.
    pub fn area(&self) -> f64 {
        self.best.area().value
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format": "positivity-class-estimate/1",
            "class": self.class,
            "canonical_class": self.canonical_class,
            "area": fmt17(self.area()),
            "area_abs_error": fmt17(self.best.area().abs_error),
            "sign_changes": self.best.sign_changes(),
            "pairs": self
                .best
                .pairs()
                .iter()
                .map(|&(p, q)| json!([fmt17(p), fmt17(q)]))
                .collect::<Vec<_>>(),
            "construction_bound": fmt17(self.construction_bound),
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "area_budget": self.area_budget,
            "seed": self.seed,
            "caveat": self.caveat,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::task_rng;
    use rand::Rng;
    use std::f64::consts::PI;

    const TEST_BUDGET: usize = 10_000;

    #[test]
    fn classes_canonicalise_to_even() {
        assert_eq!(canonical_class(2), 2);
        assert_eq!(canonical_class(3), 2);
        assert_eq!(canonical_class(8), 8);
        assert_eq!(canonical_class(9), 8);
    }

    #[test]
    fn candidate_evaluation_matches_the_trigonometric_sum() {
        let pairs = [(0.5, -0.25), (0.0, 1.0), (-2.0, 0.125)];
        let c = Candidate::from_pairs(&pairs, TEST_BUDGET).unwrap();
        // Normalisation divides by 2, the largest magnitude.
        assert!((c.pairs()[2].0 + 1.0).abs() < 1e-15);
        for &(rho, theta) in &[(0.3f64, 0.7f64), (0.9, -2.0), (1.0, 4.1)] {
            let direct: f64 = pairs
                .iter()
                .enumerate()
                .map(|(i, &(p, q))| {
                    let n = (i + 1) as f64;
                    rho.powi(i as i32 + 1) / 2.0
                        * (p * (n * theta).cos() + q * (n * theta).sin())
                })
                .sum();
            let z = C64::new(rho * theta.cos(), rho * theta.sin());
            assert!((c.evaluate(z) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn feasibility_matches_the_monomial_counts() {
        let re_z = Candidate::from_pairs(&[(1.0, 0.0)], TEST_BUDGET).unwrap();
        assert_eq!(re_z.sign_changes(), 2);
        assert!(feasibility(&re_z, 2));
        // Half-disc area for a single monomial, whatever its order.
        assert!((re_z.area().value - PI / 2.0).abs() < 0.01);

        let re_z3 =
            Candidate::from_pairs(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], TEST_BUDGET).unwrap();
        assert_eq!(re_z3.sign_changes(), 6);
        assert!(!feasibility(&re_z3, 4));
        assert!(feasibility(&re_z3, 6));
    }

    #[test]
    fn zero_candidate_is_degenerate() {
        assert!(matches!(
            Candidate::from_pairs(&[(0.0, 0.0)], TEST_BUDGET),
            Err(NodalError::Degenerate(_))
        ));
        assert!(Candidate::from_pairs(&[(f64::NAN, 0.0)], TEST_BUDGET).is_err());
    }

    /// Independent sign-change count: dense cyclic scan at a resolution
    /// unrelated to the sampler in the metrics module.
    fn dense_scan_nu(c: &Candidate) -> usize {
        let m = 40_013; // prime, so no lattice alignment with 16*degree
        let mut count = 0;
        let mut prev = c
            .evaluate(C64::new(1.0, 0.0))
            .signum();
        for k in 1..=m {
            let t = 2.0 * PI * k as f64 / m as f64;
            let v = c.evaluate(C64::new(t.cos(), t.sin()));
            if v == 0.0 {
                continue;
            }
            if v.signum() != prev {
                count += 1;
                prev = v.signum();
            }
        }
        count
    }

    #[test]
    fn seeded_candidates_match_a_dense_sign_scan() {
        for seed in 0..6u64 {
            let mut rng = task_rng(seed, 31);
            let pairs: Vec<(f64, f64)> = (0..6)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let c = Candidate::from_pairs(&pairs, TEST_BUDGET).unwrap();
            assert_eq!(c.sign_changes(), dense_scan_nu(&c), "seed {seed}");
        }
    }

    #[test]
    fn warm_start_falls_back_to_the_half_monomial() {
        let c = warm_start(2, &[], TEST_BUDGET).unwrap();
        assert_eq!(c.pairs(), &[(1.0, 0.0)]);
        let c8 = warm_start(8, &[], TEST_BUDGET).unwrap();
        assert_eq!(c8.pairs().len(), 4);
        assert_eq!(c8.pairs()[3], (1.0, 0.0));
        assert_eq!(c8.sign_changes(), 8);
        assert!(warm_start(1, &[], TEST_BUDGET).is_err());
    }

    #[test]
    fn records_serialise_with_their_certificate() {
        let best = Candidate::from_pairs(&[(1.0, 0.0)], TEST_BUDGET).unwrap();
        let record = EstimateRecord {
            class: 3,
            canonical_class: 2,
            best,
            construction_bound: PI / 2.0,
            evaluations: 42,
            restarts: 1,
            area_budget: TEST_BUDGET,
            seed: 7,
            caveat: ESTIMATE_CAVEAT,
        };
        let doc = record.to_json();
        assert_eq!(doc["format"], "positivity-class-estimate/1");
        assert_eq!(doc["canonical_class"], 2);
        assert_eq!(doc["pairs"].as_array().unwrap().len(), 1);
        assert!(doc["caveat"].as_str().unwrap().contains("upper estimate"));
    }
}
