//! Synthetic inputs: tick streams with repeated quotes, and return series
//! with known correlation structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::returns::{TickSeries, TRADING_DAY_SECONDS};
use crate::stable::{sample, StableParams};
use crate::tlf::{truncate, SigmaRule};

/// Shape of a synthetic tick stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickConfig {
    /// Probability that a tick repeats the previous level.
    pub repeat_prob: f64,
    /// Mean spacing of the emitted ticks in trading-clock seconds.
    pub mean_spacing: f64,
    pub start_level: f64,
    pub trading_day_seconds: f64,
}

impl Default for TickConfig {
    fn default() -> Self {
        // ~73% repeats; spacing chosen so the de-duplicated stream averages
        // 19.3 s between fluctuations
        Self {
            repeat_prob: 0.73,
            mean_spacing: 19.3 * 0.27,
            start_level: 6209.392,
            trading_day_seconds: TRADING_DAY_SECONDS,
        }
    }
}

/// Turns log returns into a tick stream. Each emitted tick either repeats
/// the last level (probability `repeat_prob`) or applies the next return;
/// generation stops when the returns run out. Timestamps count trading
/// seconds only (overnight closures are not represented), so the mean tick
/// spacing is `mean_spacing`.
pub fn ticks_from_returns(returns: &[f64], config: &TickConfig, seed: u64) -> Result<TickSeries> {
    if !(0.0..1.0).contains(&config.repeat_prob) {
        return Err(Error::param(
            "repeat_prob",
            format!("{} not in [0, 1)", config.repeat_prob),
        ));
    }
    if !(config.mean_spacing > 0.0 && config.start_level > 0.0) {
        return Err(Error::param(
            "mean_spacing",
            "spacing and start level must be positive",
        ));
    }
    let gap = Exp::new(1.0 / config.mean_spacing)
        .map_err(|e| Error::param("mean_spacing", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![config.start_level];
    let mut times = vec![0.0];
    let mut log_level = config.start_level.ln();
    let mut next = returns.iter();
    loop {
        let t = times[times.len() - 1] + gap.sample(&mut rng);
        if rng.random::<f64>() < config.repeat_prob {
            values.push(values[values.len() - 1]);
        } else {
            let Some(r) = next.next() else { break };
            log_level += r;
            values.push(log_level.exp());
        }
        times.push(t);
    }
    TickSeries::new(values, Some(times))
}

/// Stable variates cut at `n_std` sample deviations: i.i.d. with finite
/// variance.
pub fn truncated_stable_returns(
    params: &StableParams,
    n: usize,
    n_std: f64,
    rule: SigmaRule,
    seed: u64,
) -> Result<Vec<f64>> {
    truncate(&sample(params, n, seed)?, n_std, rule)
}

/// `x_t = phi x_{t-1} + e_t`, Gaussian innovations, started from the
/// stationary law.
pub fn ar1(n: usize, phi: f64, seed: u64) -> Result<Vec<f64>> {
    if !(phi.abs() < 1.0) {
        return Err(Error::param(
            "phi",
            format!("|{phi}| >= 1 is not stationary"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 - phi * phi).sqrt();
    Ok((0..n)
        .map(|_| {
            let v = x;
            x = phi * x + rng.sample::<f64, _>(StandardNormal);
            v
        })
        .collect())
}

/// Volatility clustering: i.i.d. signs times `|e_t| exp(h_t)` where the log
/// scale `h_t` is a slow AR(1). Returns decorrelate at once, absolute
/// returns stay correlated over many lags.
pub fn volatility_clustered(
    n: usize,
    persistence: f64,
    vol_of_vol: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(persistence.abs() < 1.0) || !(vol_of_vol >= 0.0) {
        return Err(Error::param(
            "persistence",
            "need |persistence| < 1 and vol_of_vol >= 0",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innov = vol_of_vol * (1.0 - persistence * persistence).sqrt();
    let mut h: f64 = vol_of_vol * rng.sample::<f64, _>(StandardNormal);
    Ok((0..n)
        .map(|_| {
            h = persistence * h + innov * rng.sample::<f64, _>(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            e * h.exp()
        })
        .collect())
}

/// Moving sum of `window` Gaussian innovations: autocorrelation
/// `1 - d / window` up to lag `window`, zero beyond.
pub fn moving_sum(n: usize, window: usize, seed: u64) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: Vec<f64> = (0..n + window - 1)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let mut acc: f64 = e[..window].iter().sum();
    let mut out = Vec::with_capacity(n);
    out.push(acc);
    for t in 1..n {
        acc += e[t + window - 1] - e[t - 1];
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns::{dedup_ticks, log_returns};

    #[test]
    fn tick_stream_replays_the_returns() {
        let r = [0.01, -0.02, 0.005];
        let t = ticks_from_returns(&r, &TickConfig::default(), 1).unwrap();
        let back = log_returns(&dedup_ticks(&t).unwrap()).unwrap();
        for (a, b) in back.returns().iter().zip(&r) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ar1_is_stationary_and_seeded() {
        let a = ar1(1000, 0.5, 4).unwrap();
        assert_eq!(a, ar1(1000, 0.5, 4).unwrap());
        assert!(ar1(10, 1.0, 4).is_err());
    }

    #[test]
    fn moving_sum_window() {
        let x = moving_sum(5, 3, 2).unwrap();
        assert_eq!(x.len(), 5);
    }
}
