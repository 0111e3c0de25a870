//! Small numeric utilities shared across modules.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::Value;

use crate::error::{NodalError, Result};

/// 17 significant digits: enough for an exact `f64` round trip through text.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn field_f64(value: &Value, key: &str) -> Result<f64> {
    parse_f64(
        value
            .get(key)
            .ok_or_else(|| NodalError::Format(format!("missing field {key}")))?,
    )
}

pub(crate) fn field_u64(value: &Value, key: &str) -> Result<u64> {
    value
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| NodalError::Format(format!("missing integer field {key}")))
}

pub(crate) fn parse_f64(value: &Value) -> Result<f64> {
    value
        .as_str()
        .ok_or_else(|| NodalError::Format("expected a decimal string".into()))?
        .parse()
        .map_err(|e| NodalError::Format(format!("bad decimal string: {e}")))
}

/// Signed real number stored as `sign * exp(ln_abs)`.
///
/// Used for quantities such as high-order Legendre derivatives whose magnitude
/// overflows `f64` while ratios and signs stay meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: i8,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        ln_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn new(value: f64) -> Self {
        if value == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                ln_abs: value.abs().ln(),
                sign: if value > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn from_parts(ln_abs: f64, sign: i8) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { ln_abs, sign }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Converts back to `f64`; overflows to signed infinity, underflows to 0.
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn mul(&self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        SignedLog {
            ln_abs: self.ln_abs + other.ln_abs,
            sign: self.sign * other.sign,
        }
    }

    pub fn scale(&self, factor: f64) -> SignedLog {
        self.mul(SignedLog::new(factor))
    }

    /// Exact log-domain addition: the larger magnitude is factored out.
    pub fn add(&self, other: SignedLog) -> SignedLog {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (&other, *self)
        };
        let t = (small.ln_abs - big.ln_abs).exp() * (small.sign * big.sign) as f64;
        let w = 1.0 + t;
        if w == 0.0 {
            return Self::ZERO;
        }
        SignedLog {
            ln_abs: big.ln_abs + w.abs().ln(),
            sign: big.sign * if w > 0.0 { 1 } else { -1 },
        }
    }
}

/// `ln(n!)` by direct log accumulation; exact enough for n in the tens of
/// thousands and keeps the crate free of special-function dependencies.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln` of the rising-style product `m * (m+1) * ... * n` for `m <= n`.
pub fn ln_product_range(m: usize, n: usize) -> f64 {
    (m.max(1)..=n).map(|k| (k as f64).ln()).sum()
}

/// Solves `rho * exp(rho) = target` for `rho > 0` (principal branch) by Newton
/// iteration with a log-domain start.
pub fn solve_rho_exp_rho(target: f64) -> f64 {
    assert!(target > 0.0, "solve_rho_exp_rho needs a positive target");
    let mut rho = if target < 1.0 {
        target
    } else {
        let l = target.ln();
        (l - l.max(1.0).ln().max(0.0)).max(0.5)
    };
    for _ in 0..80 {
        let f = rho * rho.exp() - target;
        let df = (1.0 + rho) * rho.exp();
        let step = f / df;
        rho -= step;
        if rho <= 0.0 {
            rho = 1e-12;
        }
        if step.abs() < 1e-14 * (1.0 + rho.abs()) {
            break;
        }
    }
    rho
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; standard accuracy (~1e-15) for
/// the orders used here (<= 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            pp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Deterministic RNG for parallel task `index` of a run seeded by `seed`.
///
/// Every parallel loop draws its randomness through this helper so results do
/// not depend on the number of worker threads.
pub fn task_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Natural cubic spline through `(x_i, y_i)` with strictly increasing `x`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for natural boundary conditions.
            let mut a = vec![0.0; n];
            let mut b = vec![2.0; n];
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                a[i] = h0 / (h0 + h1);
                c[i] = h1 / (h0 + h1);
                d[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) / (h0 + h1);
            }
            for i in 1..n - 1 {
                let w = a[i] / b[i - 1];
                b[i] -= w * c[i - 1];
                d[i] -= w * d[i - 1];
            }
            for i in (1..n - 1).rev() {
                m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
            }
        }
        CubicSpline { x, y, m }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.x[hi] - self.x[lo];
        let u = (t - self.x[lo]) / h;
        let v = 1.0 - u;
        v * self.y[lo]
            + u * self.y[hi]
            + h * h / 6.0 * ((v * v * v - v) * self.m[lo] + (u * u * u - u) * self.m[hi])
    }
}
