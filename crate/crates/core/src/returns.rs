//! Tick series, log returns, aggregation by block sums, and moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of a trading day on the Mexican exchange (6.5 h), in seconds.
pub const TRADING_DAY_SECONDS: f64 = 23_400.0;

/// Irregularly sampled index levels `Y_k`, optionally time-stamped
/// (seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    values: Vec<f64>,
    timestamps: Option<Vec<f64>>,
}

impl TickSeries {
    pub fn new(values: Vec<f64>, timestamps: Option<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("tick series is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "tick {i} has non-positive or non-finite value {}",
                values[i]
            )));
        }
        if let Some(ts) = &timestamps {
            if ts.len() != values.len() {
                return Err(Error::InvalidInput(format!(
                    "{} timestamps for {} values",
                    ts.len(),
                    values.len()
                )));
            }
            if ts.iter().any(|t| !t.is_finite()) {
                return Err(Error::InvalidInput("non-finite timestamp".into()));
            }
            if let Some(i) = ts.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::InvalidInput(format!(
                    "timestamps decrease at tick {}",
                    i + 1
                )));
            }
        }
        Ok(Self { values, timestamps })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean spacing `(last - first) / (N - 1)` in seconds, if time-stamped.
    pub fn mean_dt(&self) -> Option<f64> {
        let ts = self.timestamps.as_ref()?;
        if ts.len() < 2 {
            return None;
        }
        Some((ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64)
    }
}

/// Log-return fluctuations at aggregation level `n_conv` (1 = raw).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    returns: Vec<f64>,
    n_conv: usize,
    mean_dt: Option<f64>,
}

impl ReturnSeries {
    /// A raw (level 1) series. `mean_dt` is the mean number of seconds
    /// between the underlying fluctuations, when known.
    pub fn new(returns: Vec<f64>, mean_dt: Option<f64>) -> Result<Self> {
        if returns.is_empty() {
            return Err(Error::InvalidInput("return series is empty".into()));
        }
        if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "return {i} is not finite ({})",
                returns[i]
            )));
        }
        if let Some(dt) = mean_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::param("mean_dt", format!("{dt} is not positive")));
            }
        }
        Ok(Self {
            returns,
            n_conv: 1,
            mean_dt,
        })
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn into_returns(self) -> Vec<f64> {
        self.returns
    }

    pub fn n_conv(&self) -> usize {
        self.n_conv
    }

    pub fn mean_dt(&self) -> Option<f64> {
        self.mean_dt
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn stats(&self) -> Result<SeriesStats> {
        series_stats(&self.returns, self.mean_dt)
    }
}

/// Count, mean, population variance and excess kurtosis of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub excess_kurtosis: f64,
    pub mean_dt: Option<f64>,
}

/// Removes consecutive repeated values, keeping the first tick of each run
/// (and its timestamp).
pub fn dedup_ticks(ticks: &TickSeries) -> Result<TickSeries> {
    if ticks.is_empty() {
        return Err(Error::InvalidInput("tick series is empty".into()));
    }
    let v = &ticks.values;
    let keep: Vec<usize> = (0..v.len())
        .filter(|&i| i == 0 || v[i] != v[i - 1])
        .collect();
    Ok(TickSeries {
        values: keep.iter().map(|&i| v[i]).collect(),
        timestamps: ticks
            .timestamps
            .as_ref()
            .map(|ts| keep.iter().map(|&i| ts[i]).collect()),
    })
}

/// `S_k = ln Y_{k+1} - ln Y_k`.
pub fn log_returns(ticks: &TickSeries) -> Result<ReturnSeries> {
    if ticks.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 ticks for a return, got {}",
            ticks.len()
        )));
    }
    let logs: Vec<f64> = ticks.values.iter().map(|y| y.ln()).collect();
    let returns = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_dt = ticks.mean_dt().filter(|dt| *dt > 0.0);
    ReturnSeries::new(returns, mean_dt)
}

/// Non-overlapping block sums of length `n_conv`; a trailing partial block
/// is dropped. Aggregating an already aggregated series multiplies the
/// levels.
pub fn convolve_returns(series: &ReturnSeries, n_conv: usize) -> Result<ReturnSeries> {
    if n_conv == 0 {
        return Err(Error::param("n_conv", "must be at least 1"));
    }
    let blocks = series.len() / n_conv;
    if blocks == 0 {
        return Err(Error::EmptyResult(format!(
            "series of length {} has no complete block of {n_conv}",
            series.len()
        )));
    }
    let returns = series
        .returns
        .chunks_exact(n_conv)
        .map(|c| c.iter().sum())
        .collect();
    Ok(ReturnSeries {
        returns,
        n_conv: series.n_conv * n_conv,
        mean_dt: series.mean_dt,
    })
}

/// Moments with the population (divisor N) convention and
/// `k = <(S - mu)^4> / <(S - mu)^2>^2 - 3`.
pub fn series_stats(values: &[f64], mean_dt: Option<f64>) -> Result<SeriesStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 values for kurtosis, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in values {
        let d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m4 /= nf;
    if !(m2 > 0.0) {
        return Err(Error::DegenerateVariance(format!(
            "all {n} values equal {mean}"
        )));
    }
    Ok(SeriesStats {
        count: n,
        mean,
        variance: m2,
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        mean_dt,
    })
}

/// Excess kurtosis alone; see [`series_stats`].
pub fn excess_kurtosis(values: &[f64]) -> Result<f64> {
    Ok(series_stats(values, None)?.excess_kurtosis)
}
