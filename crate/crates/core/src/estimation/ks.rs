//! One-sample Kolmogorov-Smirnov test against a fitted stable law.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stable::table::CdfTable;
use crate::stable::{StableDensity, StableParams};

/// Above this many points the model CDF comes from a spline table.
pub const EXACT_CDF_LIMIT: usize = 20_000;

/// Statistic, asymptotic p-value and decision at the requested level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
}

/// `D = max_i max((i + 1)/n - F_i, F_i - i/n)` for sorted samples with model
/// CDF values `F_i`. Ties need no special care: within a run of equal
/// values the extremes of the formula are the one-sided limits of the
/// right-continuous empirical CDF.
pub fn ks_statistic(cdf_sorted: &[f64]) -> f64 {
    let nf = cdf_sorted.len() as f64;
    cdf_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    if x < 1.0 {
        // Jacobi-transformed series converges fast for small x
        let t = -PI * PI / (8.0 * x * x);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            let term = (j * j * t).exp();
            cdf += term;
            if term < 1e-18 * cdf {
                break;
            }
        }
        cdf *= (2.0 * PI).sqrt() / x;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut q = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        q += sign * term;
        if term < 1e-18 * q.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * q).clamp(0.0, 1.0)
}

/// Asymptotic p-value of statistic `d` on `n` points.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    kolmogorov_survival((n as f64).sqrt() * d)
}

fn sorted_copy(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples to test".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("samples contain NaN".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Model CDF at each (sorted) sample, by direct inversion for small
/// samples and through a spline table for large ones.
pub(crate) fn model_cdf(sorted: &[f64], params: &StableParams) -> Result<Vec<f64>> {
    let d = StableDensity::new(*params)?;
    if sorted.len() <= EXACT_CDF_LIMIT {
        return Ok(sorted.iter().map(|&x| d.cdf(x)).collect());
    }
    let table = CdfTable::new(d.standard().clone(), crate::stable::table::DEFAULT_DS);
    Ok(sorted
        .iter()
        .map(|&x| table.cdf(d.standardize(x)))
        .collect())
}

/// K-S test of `samples` against the stable law `params`; rejects when
/// `p < significance`.
pub fn ks_test(samples: &[f64], params: &StableParams, significance: f64) -> Result<KsOutcome> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::param(
            "significance",
            format!("{significance} not in (0, 1)"),
        ));
    }
    let sorted = sorted_copy(samples)?;
    let cdf = model_cdf(&sorted, params)?;
    let statistic = ks_statistic(&cdf);
    let p_value = ks_pvalue(statistic, sorted.len());
    Ok(KsOutcome {
        statistic,
        p_value,
        reject: p_value < significance,
    })
}

/// Same statistic against an arbitrary distribution function.
pub fn ks_statistic_with(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let sorted = sorted_copy(samples)?;
    let values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    Ok(ks_statistic(&values))
}
