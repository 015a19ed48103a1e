//! Cubic-spline tables over the density body, used when the same law is
//! evaluated at many points (likelihoods, large K-S tests).
//!
//! The grid is uniform in `s = asinh(z)`, which is dense near the mode and
//! logarithmic in the tails where `ln f` is nearly linear in `s`.

use std::sync::Arc;

use super::density::StandardStable;

/// Default spacing in `asinh(z)`.
pub(crate) const DEFAULT_DS: f64 = 0.01;
const LN_FLOOR: f64 = -700.0;
const MARGIN: usize = 30;

/// Natural cubic spline on a uniform grid.
#[derive(Debug, Clone)]
pub(crate) struct UniformSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 2);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for m[i-1] + 4 m[i] + m[i+1] = rhs, m[0] = m[n-1] = 0
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
                let denom = 4.0 - if i > 0 { c[i - 1] } else { 0.0 };
                c[i] = 1.0 / denom;
                d[i] = (rhs - if i > 0 { d[i - 1] } else { 0.0 }) / denom;
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Self { x0, h, y, m }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = (x - self.x0) / self.h;
        let i = (t.floor() as isize).clamp(0, n as isize - 2) as usize;
        let a = t - i as f64;
        let b = 1.0 - a;
        let h2 = self.h * self.h / 6.0;
        b * self.y[i]
            + a * self.y[i + 1]
            + ((b * b * b - b) * self.m[i] + (a * a * a - a) * self.m[i + 1]) * h2
    }
}

fn body_grid(std: &StandardStable, ds: f64) -> (f64, f64, Vec<f64>) {
    let (l, r) = std.splice_points();
    let (s_lo, s_hi) = (l.asinh(), r.asinh());
    let n = ((s_hi - s_lo) / ds).ceil().max(1.0) as usize + 1;
    let h = (s_hi - s_lo) / (n - 1) as f64;
    // the natural end condition is wrong for these functions; its error
    // decays geometrically inward, so the knots run past the body
    let s0 = s_lo - MARGIN as f64 * h;
    let zs = (0..n + 2 * MARGIN)
        .map(|i| (s0 + h * i as f64).sinh())
        .collect();
    (s0, h, zs)
}

/// `ln f` of a standard law: spline in the body, expansion in the tails.
#[derive(Debug, Clone)]
pub(crate) struct LogPdfTable {
    standard: Arc<StandardStable>,
    spline: UniformSpline,
}

impl LogPdfTable {
    pub fn new(standard: Arc<StandardStable>, ds: f64) -> Self {
        let (s0, h, zs) = body_grid(&standard, ds);
        let y = zs.iter().map(|&z| safe_ln(standard.pdf(z))).collect();
        Self {
            spline: UniformSpline::new(s0, h, y),
            standard,
        }
    }

    pub fn ln_pdf(&self, z: f64) -> f64 {
        if self.standard.in_body(z) {
            self.spline.eval(z.asinh())
        } else {
            safe_ln(self.standard.tail_pdf(z))
        }
    }
}

/// Distribution function of a standard law via spline in the body.
#[derive(Debug, Clone)]
pub(crate) struct CdfTable {
    standard: Arc<StandardStable>,
    spline: UniformSpline,
}

impl CdfTable {
    pub fn new(standard: Arc<StandardStable>, ds: f64) -> Self {
        let (s0, h, zs) = body_grid(&standard, ds);
        let y = zs.iter().map(|&z| standard.cdf(z)).collect();
        Self {
            spline: UniformSpline::new(s0, h, y),
            standard,
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if self.standard.in_body(z) {
            self.spline.eval(z.asinh()).clamp(0.0, 1.0)
        } else {
            self.standard.cdf(z)
        }
    }
}

pub(crate) fn safe_ln(f: f64) -> f64 {
    if f > 0.0 {
        f.ln().max(LN_FLOOR)
    } else {
        LN_FLOOR
    }
}
