//! The truncated, rescaled series on the unit disc.

use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::metrics::{positivity_area, AreaEstimate, AreaMethod, Disc};
use crate::{C64, NodalError, Result};

/// Provenance of a construction run: every measured constant the pipeline
/// committed to, so an artifact can be audited without rerunning it.
#[derive(Clone, Debug)]
pub struct Provenance {
    /// Measured bound on the entire function outside the right half-strip.
    pub c4: f64,
    /// Recentering shift applied before coefficient extraction.
    pub shift: f64,
    /// Growth constant behind the circle-radius policy.
    pub c5_eff: f64,
    /// Measured coefficient-decay constant.
    pub c6_eff: f64,
    /// Description of the band quadrature.
    pub quadrature: String,
}

/// Degree-`N` polynomial `P(z) = Q(r_N z)` on the closed unit disc, where `Q`
/// is the truncated series of the shifted entire function and `r_N` passed
/// the tail certificate.
#[derive(Clone, Debug)]
pub struct ExtremalPolynomial {
    pub degree: usize,
    /// The rescale radius `r_N`.
    pub scale_radius: f64,
    /// Tail budget the truncation certificate was checked against.
    pub kappa: f64,
    /// Certified bound on the discarded tail, `sum_{n > N} |a_n| r_N^n`.
    pub truncation_bound: f64,
    /// Number of times the radius had to shrink before the tail certificate
    /// passed.
    pub tail_retries: usize,
    /// `coefficients[n]` multiplies `z^n`; index 0 is exactly zero.
    pub coefficients: Vec<C64>,
    pub provenance: Provenance,
}

/// Positivity-area measurements of `Re P` on the unit disc at the two margins
/// the construction certifies.
#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub margin_zero: AreaEstimate,
    pub margin_kappa: AreaEstimate,
    /// `margin_zero.value / pi`.
    pub ratio_zero: f64,
    /// `margin_kappa.value / pi`.
    pub ratio_kappa: f64,
}

impl ExtremalPolynomial {
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn real_part(&self, z: C64) -> f64 {
        self.eval(z).re
    }

    /// The unrescaled truncation `Q(w)` on the disc of radius `r_N`.
    pub fn unscaled_eval(&self, w: C64) -> C64 {
        self.eval(w / self.scale_radius)
    }

    /// Worst point of the exterior-strip sign condition: scans the part of
    /// the radius-`r_N` disc with `|Im w| >= pi/2` and reports a point where
    /// `Re Q > -kappa`, if one exists. `None` means the condition holds on
    /// the probe grid (vacuously when `r_N <= pi/2`).
    pub fn strip_witness(&self) -> Option<(C64, f64)> {
        let r = self.scale_radius;
        if r <= PI / 2.0 {
            return None;
        }
        let mut worst: Option<(C64, f64)> = None;
        let n_grid = 400;
        for i in 0..=n_grid {
            let x = -r + 2.0 * r * i as f64 / n_grid as f64;
            for j in 0..=n_grid {
                let y = -r + 2.0 * r * j as f64 / n_grid as f64;
                if y.abs() < PI / 2.0 || x * x + y * y > r * r {
                    continue;
                }
                let w = C64::new(x, y);
                let v = self.unscaled_eval(w).re;
                if v > -self.kappa && worst.map_or(true, |(_, wv)| v > wv) {
                    worst = Some((w, v));
                }
            }
        }
        worst
    }

    /// Area of `{Re P > -margin}` within the unit disc.
    pub fn positivity_area(
        &self,
        margin: f64,
        budget: usize,
        method: AreaMethod,
    ) -> Result<AreaEstimate> {
        positivity_area(
            |z| self.real_part(z) + margin,
            &Disc::unit(),
            budget,
            method,
        )
    }

    /// Both certified margins, with the coarse strip bound
    /// `ratio <= (2 / r_N) (1 + margin)` enforced.
    pub fn positivity_report(&self, budget: usize, method: AreaMethod) -> Result<PositivityReport> {
        let margin_zero = self.positivity_area(0.0, budget, method)?;
        let margin_kappa = self.positivity_area(self.kappa, budget, method)?;
        let ratio_zero = margin_zero.value / PI;
        let ratio_kappa = margin_kappa.value / PI;
        let strip_bound = (2.0 / self.scale_radius) * (1.0 + self.kappa);
        if ratio_kappa > strip_bound.min(1.0) + margin_kappa.abs_error / PI + 1e-9 {
            return Err(NodalError::Degenerate(format!(
                "positivity ratio {ratio_kappa} exceeds the strip bound {strip_bound}"
            )));
        }
        Ok(PositivityReport {
            margin_zero,
            margin_kappa,
            ratio_zero,
            ratio_kappa,
        })
    }

    /// Versioned JSON artifact. Floats are written as 17-significant-digit
    /// decimal strings, which round-trip `f64` exactly.
    pub fn to_json(&self) -> Value {
        json!({
            "format": "extremal-polynomial",
            "version": 1,
            "degree": self.degree,
            "scale_radius": fmt17(self.scale_radius),
            "kappa": fmt17(self.kappa),
            "truncation_bound": fmt17(self.truncation_bound),
            "tail_retries": self.tail_retries,
            "coefficients": self
                .coefficients
                .iter()
                .map(|c| json!([fmt17(c.re), fmt17(c.im)]))
                .collect::<Vec<_>>(),
            "provenance": {
                "c4_measured": fmt17(self.provenance.c4),
                "shift": fmt17(self.provenance.shift),
                "c5_eff": fmt17(self.provenance.c5_eff),
                "c6_eff": fmt17(self.provenance.c6_eff),
                "quadrature": self.provenance.quadrature,
            },
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        if value.get("format").and_then(Value::as_str) != Some("extremal-polynomial") {
            return Err(NodalError::Format("not an extremal-polynomial document".into()));
        }
        if value.get("version").and_then(Value::as_u64) != Some(1) {
            return Err(NodalError::Format("unsupported document version".into()));
        }
        let degree = field_u64(value, "degree")? as usize;
        let coeffs = value
            .get("coefficients")
            .and_then(Value::as_array)
            .ok_or_else(|| NodalError::Format("missing coefficients".into()))?;
        let mut coefficients = Vec::with_capacity(coeffs.len());
        for entry in coeffs {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| NodalError::Format("coefficient is not a [re, im] pair".into()))?;
            coefficients.push(C64::new(parse_f64(&pair[0])?, parse_f64(&pair[1])?));
        }
        if coefficients.len() != degree + 1 {
            return Err(NodalError::Format(format!(
                "degree {degree} does not match {} coefficients",
                coefficients.len()
            )));
        }
        let prov = value
            .get("provenance")
            .ok_or_else(|| NodalError::Format("missing provenance".into()))?;
        Ok(ExtremalPolynomial {
            degree,
            scale_radius: field_f64(value, "scale_radius")?,
            kappa: field_f64(value, "kappa")?,
            truncation_bound: field_f64(value, "truncation_bound")?,
            tail_retries: field_u64(value, "tail_retries")? as usize,
            coefficients,
            provenance: Provenance {
                c4: field_f64(prov, "c4_measured")?,
                shift: field_f64(prov, "shift")?,
                c5_eff: field_f64(prov, "c5_eff")?,
                c6_eff: field_f64(prov, "c6_eff")?,
                quadrature: prov
                    .get("quadrature")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
            },
        })
    }
}

pub(crate) use crate::util::{field_f64, field_u64, fmt17, parse_f64};
