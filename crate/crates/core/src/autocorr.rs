//! Sample autocorrelation of returns and absolute returns, white-noise
//! bands, and the persistence time of positive correlation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::returns::ReturnSeries;

/// Two-sided 95% normal quantile.
pub const WHITE_NOISE_Z: f64 = 1.959_963_984_540_054;

/// Coefficients at lags `0..=max_lag` with the `z / sqrt(n)` band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    pub lags: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub band: f64,
    pub n: usize,
}

impl AcfResult {
    /// Share of lags `1..=max_lag` whose coefficient lies inside the band.
    pub fn fraction_inside(&self) -> f64 {
        let inside = self.coefficients[1..]
            .iter()
            .filter(|c| c.abs() <= self.band)
            .count();
        inside as f64 / (self.coefficients.len() - 1) as f64
    }
}

/// Biased autocorrelation
/// `r(d) = sum_{k<N-d} (x_k - m)(x_{k+d} - m) / sum_k (x_k - m)^2`
/// with band `band_z / sqrt(N)`.
pub fn acf_of(values: &[f64], max_lag: usize, band_z: f64) -> Result<AcfResult> {
    let n = values.len();
    if max_lag < 1 || n <= max_lag {
        return Err(Error::InvalidInput(format!(
            "need 1 <= max_lag < length, got max_lag {max_lag} for length {n}"
        )));
    }
    if !(band_z > 0.0) {
        return Err(Error::param("band_z", format!("{band_z} is not positive")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    if !(denom > 0.0) {
        return Err(Error::DegenerateVariance(format!(
            "all {n} values are equal"
        )));
    }
    let coefficients: Vec<f64> = (0..=max_lag)
        .into_par_iter()
        .map(|d| {
            if d == 0 {
                return 1.0;
            }
            let num: f64 = centered[..n - d]
                .iter()
                .zip(&centered[d..])
                .map(|(a, b)| a * b)
                .sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect();
    Ok(AcfResult {
        lags: (0..=max_lag).collect(),
        coefficients,
        band: band_z / (n as f64).sqrt(),
        n,
    })
}

pub fn acf(series: &ReturnSeries, max_lag: usize) -> Result<AcfResult> {
    acf_of(series.returns(), max_lag, WHITE_NOISE_Z)
}

pub fn abs_acf(series: &ReturnSeries, max_lag: usize) -> Result<AcfResult> {
    let abs: Vec<f64> = series.returns().iter().map(|r| r.abs()).collect();
    acf_of(&abs, max_lag, WHITE_NOISE_Z)
}

/// Largest `L` such that the coefficients at lags `1..=L` all exceed the
/// upper band (0 if lag 1 does not).
pub fn persistence_lag(result: &AcfResult) -> usize {
    result.coefficients[1..]
        .iter()
        .take_while(|&&c| c > result.band)
        .count()
}

/// [`persistence_lag`] in seconds.
pub fn persistence_time(result: &AcfResult, mean_dt: f64) -> Result<f64> {
    if !(mean_dt > 0.0) {
        return Err(Error::param(
            "mean_dt",
            format!("{mean_dt} is not positive"),
        ));
    }
    Ok(persistence_lag(result) as f64 * mean_dt)
}
