//! Quantile-matching starting point for the likelihood search.
//!
//! Uses the location/scale free ratios
//! `nu_a = (q95 - q05) / (q75 - q25)` (tail weight, decreasing in alpha) and
//! `nu_b = (q95 + q05 - 2 q50) / (q95 - q05)` (asymmetry), matched against
//! the same ratios of the numerical stable quantiles.

use crate::error::{Error, Result};
use crate::stable::{QuadratureOptions, StandardStable};

const PROBS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];
const ALPHA_LO: f64 = 0.6;
const ALPHA_HI: f64 = 2.0;
/// Starting alpha is kept off the boundary so the simplex can move both ways.
const ALPHA_START_MAX: f64 = 1.95;

/// Starting values in the S0 coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Start {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta0: f64,
}

/// Linear-interpolation sample quantile of sorted data.
pub(crate) fn sample_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

fn law_quantiles(alpha: f64, beta: f64) -> Result<[f64; 5]> {
    let law = StandardStable::new(alpha, beta, &QuadratureOptions::default())?;
    let mut q = [0.0; 5];
    for (slot, &p) in q.iter_mut().zip(&PROBS) {
        *slot = law.quantile(p)?;
    }
    Ok(q)
}

fn nu_alpha(q: &[f64; 5]) -> f64 {
    (q[4] - q[0]) / (q[3] - q[1])
}

fn nu_beta(q: &[f64; 5]) -> f64 {
    (q[4] + q[0] - 2.0 * q[2]) / (q[4] - q[0])
}

pub(crate) fn quantile_start(sorted: &[f64]) -> Result<Start> {
    let q: Vec<f64> = PROBS.iter().map(|&p| sample_quantile(sorted, p)).collect();
    let q = [q[0], q[1], q[2], q[3], q[4]];
    if !(q[3] > q[1]) {
        return Err(Error::DegenerateVariance(
            "interquartile range of the sample is zero".into(),
        ));
    }
    let target = nu_alpha(&q);
    let alpha = if target <= nu_alpha(&law_quantiles(ALPHA_HI, 0.0)?) {
        ALPHA_HI
    } else if target >= nu_alpha(&law_quantiles(ALPHA_LO, 0.0)?) {
        ALPHA_LO
    } else {
        let (mut lo, mut hi) = (ALPHA_LO, ALPHA_HI);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if nu_alpha(&law_quantiles(mid, 0.0)?) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let alpha = alpha.min(ALPHA_START_MAX);
    // the asymmetry ratio is close to linear in beta
    let skewed = nu_beta(&law_quantiles(alpha, 1.0)?);
    let beta = if skewed.abs() > 1e-3 {
        (nu_beta(&q) / skewed).clamp(-0.9, 0.9)
    } else {
        0.0
    };
    let law = law_quantiles(alpha, beta)?;
    let gamma = (q[3] - q[1]) / (law[3] - law[1]);
    Ok(Start {
        alpha,
        beta,
        gamma,
        delta0: q[2] - gamma * law[2],
    })
}
