//! Orchestrates the construction: measure the bound, pick the shift,
//! calibrate growth and decay constants, extract coefficients once, then
//! stamp out certified polynomials of any requested degree.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::field::ScaledComplex;
use crate::util::solve_rho_exp_rho;
use crate::{C64, NodalError, Result};

use super::cauchy::taylor_coefficients;
use super::entire::EntireE;
use super::polynomial::{ExtremalPolynomial, Provenance};

/// Constants measured or derived during factory construction.
#[derive(Clone, Copy, Debug)]
pub struct PipelineConstants {
    /// Sup of the potential over the probe grid.
    pub u_sup: f64,
    /// Measured bound on the entire function outside the right half-strip.
    pub c4: f64,
    /// Recentering shift.
    pub shift: f64,
    /// Growth constant: `ln max |G|` on the radius-`rho` circle is close to
    /// `c5_eff * exp(rho)`.
    pub c5_eff: f64,
    /// Decay constant: `|a_n|^{1/n} ln n <= c6_eff` on the pilot window.
    pub c6_eff: f64,
    /// Tail budget for truncation certificates.
    pub kappa: f64,
}

/// Extra coefficients beyond the largest degree, consumed by the tail
/// certificate before its geometric extension takes over.
const TAIL_EXTRA: usize = 192;
/// Consecutive coefficient orders sharing one extraction circle.
const BUCKET: usize = 16;
/// Hard ladder cap; far beyond it even log-scale bookkeeping goes unused
/// because the rescaled coefficients leave the native range much earlier.
const DEGREE_CAP: usize = 1024;
/// Native floor for the top rescaled coefficient; below this the stored
/// polynomial would silently lose its leading term.
const MIN_TOP_LN: f64 = -730.0;

pub struct ExtremalFactory {
    entire: EntireE,
    constants: PipelineConstants,
    e_at_shift: ScaledComplex,
    /// Taylor coefficients of the shifted, recentered function; index 0 is
    /// exactly zero by construction.
    coefficients: Vec<ScaledComplex>,
    prepared: usize,
}

impl ExtremalFactory {
    /// Builds the shared pipeline able to produce polynomials up to
    /// `max_degree`. This is the expensive step; individual builds are cheap.
    pub fn new(max_degree: usize) -> Result<Self> {
        if max_degree > DEGREE_CAP {
            return Err(NodalError::Capability {
                context: "coefficient ladder",
                requested: max_degree,
                max_safe: DEGREE_CAP,
            });
        }
        if max_degree < 16 {
            return Err(NodalError::Precondition(format!(
                "factory needs max_degree >= 16, got {max_degree}"
            )));
        }

        let entire = EntireE::new()?;
        let shift = entire.shift();
        let e_at_shift = entire.eval(C64::new(shift, 0.0));
        let g = |z: C64| entire.eval(z + shift).sub(e_at_shift);

        // Growth calibration: ln max |G| on circles of a few radii. For a
        // double-exponential profile the ratio to exp(rho) stabilizes at the
        // effective growth constant.
        let c5_eff = [0.5f64, 1.0, 1.5, 2.0, 2.5, 3.0]
            .iter()
            .map(|&rho| {
                let max_ln = (0..512)
                    .into_par_iter()
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / 512.0;
                        g(C64::new(rho * t.cos(), rho * t.sin())).log_magnitude
                    })
                    .collect::<Vec<f64>>()
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                max_ln / rho.exp()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if !(c5_eff.is_finite() && c5_eff > 0.0) {
            return Err(NodalError::Degenerate(format!(
                "growth calibration produced c5_eff = {c5_eff}"
            )));
        }

        let n_cert = max_degree + TAIL_EXTRA;
        let radius_for = |n: usize| solve_rho_exp_rho(n.max(1) as f64 / c5_eff);
        let mut coefficients = taylor_coefficients(&g, C64::new(0.0, 0.0), radius_for, n_cert, BUCKET)?;

        // G(0) = 0 by construction; the extracted a_0 is pure pipeline noise
        // and must be negligible against the working-scale coefficients.
        let w_ln = radius_for(BUCKET / 2).ln();
        let scale_ln = coefficients
            .iter()
            .take(65)
            .enumerate()
            .map(|(n, a)| a.log_magnitude + n as f64 * w_ln)
            .fold(f64::NEG_INFINITY, f64::max);
        let a0_ln = coefficients[0].log_magnitude;
        if a0_ln > scale_ln + (1e-10f64).ln() {
            return Err(NodalError::Construction {
                message: format!(
                    "constant coefficient e^{a0_ln} is not negligible against \
                     the working scale e^{scale_ln}"
                ),
                retries: 0,
            });
        }
        coefficients[0] = ScaledComplex::ZERO;

        // Decay calibration over the pilot window.
        let c6_eff = (16..=64)
            .map(|n| (coefficients[n].log_magnitude / n as f64).exp() * (n as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        if !(c6_eff.is_finite() && c6_eff > 0.0) {
            return Err(NodalError::Degenerate(format!(
                "decay calibration produced c6_eff = {c6_eff}"
            )));
        }

        let constants = PipelineConstants {
            u_sup: entire.u_sup(),
            c4: entire.c4(),
            shift,
            c5_eff,
            c6_eff,
            kappa: 0.25,
        };
        log::info!(
            "extremal factory ready: c4 = {:.6}, shift = {:.6}, c5_eff = {:.6}, c6_eff = {:.6}",
            constants.c4,
            constants.shift,
            constants.c5_eff,
            constants.c6_eff
        );

        Ok(ExtremalFactory {
            entire,
            constants,
            e_at_shift,
            coefficients,
            prepared: max_degree,
        })
    }

    /// The shifted, recentered entire function the coefficients came from.
    pub fn series_fn(&self) -> impl Fn(C64) -> ScaledComplex + Sync + '_ {
        let shift = self.constants.shift;
        let e0 = self.e_at_shift;
        move |z: C64| self.entire.eval(z + shift).sub(e0)
    }

    /// Recomputes the decay constant from a fresh pilot-window extraction at
    /// `oversample`-times the base circle density.
    pub fn decay_constant_oversampled(&self, oversample: usize) -> Result<f64> {
        let c5 = self.constants.c5_eff;
        let coeffs = super::cauchy::taylor_coefficients_oversampled(
            self.series_fn(),
            C64::new(0.0, 0.0),
            |n| solve_rho_exp_rho(n.max(1) as f64 / c5),
            64,
            BUCKET,
            oversample,
        )?;
        Ok((16..=64)
            .map(|n| (coeffs[n].log_magnitude / n as f64).exp() * (n as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn constants(&self) -> PipelineConstants {
        self.constants
    }

    pub fn entire(&self) -> &EntireE {
        &self.entire
    }

    pub fn max_prepared(&self) -> usize {
        self.prepared
    }

    pub fn coefficient(&self, n: usize) -> ScaledComplex {
        self.coefficients[n]
    }

    /// Sum of `|a_k| r^k` over `k > degree`, including a geometric bound on
    /// orders beyond the computed ladder; all bookkeeping in log scale.
    fn tail_bound(&self, degree: usize, r: f64) -> Result<f64> {
        let ln_r = r.ln();
        let terms: Vec<f64> = (degree + 1..self.coefficients.len())
            .map(|k| self.coefficients[k].log_magnitude + k as f64 * ln_r)
            .collect();
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let sum_ln = m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();

        // Beyond the ladder: the term ratio must already be safely geometric.
        let last = *terms.last().unwrap();
        let ratio_ln = terms
            .windows(2)
            .rev()
            .take(16)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        if ratio_ln >= (0.9f64).ln() {
            return Err(NodalError::Construction {
                message: format!(
                    "tail ratio e^{ratio_ln} too close to 1 for a geometric \
                     extension at degree {degree}, radius {r}"
                ),
                retries: 0,
            });
        }
        let beyond_ln = last + ratio_ln - (-ratio_ln.exp_m1()).ln();
        let total = sum_ln.max(beyond_ln) + ((sum_ln - sum_ln.max(beyond_ln)).exp()
            + (beyond_ln - sum_ln.max(beyond_ln)).exp())
        .ln();
        Ok(total.exp())
    }

    /// Builds the certified degree-`degree` polynomial.
    pub fn build(&self, degree: usize) -> Result<ExtremalPolynomial> {
        if degree < 16 {
            return Err(NodalError::Precondition(format!(
                "degree must be at least 16, got {degree}"
            )));
        }
        if degree > self.prepared {
            return Err(NodalError::Capability {
                context: "coefficient ladder",
                requested: degree,
                max_safe: self.prepared,
            });
        }

        // Radius policy with shrink-and-retry until the tail certificate
        // clears the budget.
        let kappa = self.constants.kappa;
        let mut r = (degree as f64).ln() / (2.0 * self.constants.c6_eff);
        let mut truncation_bound = f64::INFINITY;
        let mut tail_retries = usize::MAX;
        for attempt in 0..=20usize {
            match self.tail_bound(degree, r) {
                Ok(tail) if tail <= kappa => {
                    truncation_bound = tail;
                    tail_retries = attempt;
                    break;
                }
                Ok(_) | Err(NodalError::Construction { .. }) => r *= 0.9,
                Err(e) => return Err(e),
            }
        }
        if tail_retries == usize::MAX {
            return Err(NodalError::Construction {
                message: format!(
                    "tail certificate never cleared kappa = {kappa} at degree {degree}"
                ),
                retries: 20,
            });
        }

        // Rescaled coefficients must survive natively down to the top term,
        // otherwise the stored polynomial would drop its leading coefficient.
        let ln_r = r.ln();
        let top_ln = self.coefficients[degree].log_magnitude + degree as f64 * ln_r;
        if top_ln < MIN_TOP_LN {
            let max_safe = (16..=self.prepared)
                .take_while(|&m| {
                    let rm = (m as f64).ln() / (2.0 * self.constants.c6_eff);
                    self.coefficients[m].log_magnitude + m as f64 * rm.ln() >= MIN_TOP_LN
                })
                .last()
                .unwrap_or(16);
            return Err(NodalError::Capability {
                context: "native coefficient range",
                requested: degree,
                max_safe,
            });
        }

        let mut coefficients = Vec::with_capacity(degree + 1);
        coefficients.push(C64::new(0.0, 0.0));
        for k in 1..=degree {
            let mut c = self.coefficients[k];
            c.log_magnitude += k as f64 * ln_r;
            coefficients.push(c.to_c64());
        }

        let poly = ExtremalPolynomial {
            degree,
            scale_radius: r,
            kappa,
            truncation_bound,
            tail_retries,
            coefficients,
            provenance: Provenance {
                c4: self.constants.c4,
                shift: self.constants.shift,
                c5_eff: self.constants.c5_eff,
                c6_eff: self.constants.c6_eff,
                quadrature: self.entire.potential().describe(),
            },
        };

        if let Some((w, v)) = poly.strip_witness() {
            return Err(NodalError::Construction {
                message: format!(
                    "exterior-strip sign condition fails at {w}: Re Q = {v} > -{kappa}"
                ),
                retries: tail_retries,
            });
        }
        debug_assert_eq!(poly.eval(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
        Ok(poly)
    }
}
