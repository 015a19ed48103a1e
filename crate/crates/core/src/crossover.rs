//! Fits across aggregation levels, Levy-to-Gaussian crossover detection,
//! and the truncated-simulation experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit_and_test, FitResult};
use crate::returns::{convolve_returns, excess_kurtosis, ReturnSeries, TRADING_DAY_SECONDS};
use crate::stable::{sample, StableParams};
use crate::tlf::{truncate, SigmaRule};

/// Fewest aggregated values a level needs to be fitted.
pub const MIN_BLOCKS: usize = 100;

/// Fitted parameters per aggregation level, in increasing level order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTrajectory {
    pub points: Vec<FitResult>,
    pub source_label: String,
    /// Mean seconds between raw fluctuations, when known.
    pub mean_dt: Option<f64>,
    /// Requested levels that had fewer than [`MIN_BLOCKS`] blocks.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KurtosisPoint {
    pub n_conv: usize,
    pub excess_kurtosis: f64,
}

/// Thresholds of the crossover rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverConfig {
    /// The alpha criterion holds where the fitted alpha is at least this.
    pub alpha_threshold: f64,
    /// The kurtosis criterion holds where `k` is below this fraction of its
    /// value at the first swept level.
    pub kurtosis_fraction: f64,
    pub trading_day_seconds: f64,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        Self {
            alpha_threshold: 1.99,
            kurtosis_fraction: 0.05,
            trading_day_seconds: TRADING_DAY_SECONDS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Alpha,
    Kurtosis,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub n_c: usize,
    /// `n_c * mean_dt`; absent when the series carries no timing.
    pub crossover_seconds: Option<f64>,
    pub crossover_trading_days: Option<f64>,
    pub criterion: Criterion,
    /// Human-readable statement of the rule that fired.
    pub criterion_text: String,
    /// First level from which each criterion holds at every larger level.
    pub alpha_level: Option<usize>,
    pub kurtosis_level: Option<usize>,
    pub kurtosis_points: Vec<KurtosisPoint>,
}

/// Table label of a level: the raw series is row "0/raw".
pub fn level_label(n_conv: usize) -> String {
    if n_conv == 1 {
        "0/raw".to_string()
    } else {
        n_conv.to_string()
    }
}

/// `{1, 10, 20, ..., 150, 1200, 2500, 2700}`.
pub fn table_levels() -> Vec<usize> {
    let mut v = vec![1];
    v.extend((1..=15).map(|i| 10 * i));
    v.extend([1200, 2500, 2700]);
    v
}

/// Table levels plus `{100, 200, ..., 3000}`, sorted and de-duplicated.
pub fn default_levels() -> Vec<usize> {
    let mut v = table_levels();
    v.extend((1..=30).map(|i| 100 * i));
    v.sort_unstable();
    v.dedup();
    v
}

/// Sorted unique levels with at least [`MIN_BLOCKS`] blocks, and the ones
/// dropped for being too coarse.
fn usable_levels(len: usize, levels: &[usize], warn: bool) -> Result<(Vec<usize>, Vec<usize>)> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no aggregation levels given".into()));
    }
    if levels.contains(&0) {
        return Err(Error::param("levels", "levels must be at least 1"));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let (keep, skip): (Vec<usize>, Vec<usize>) =
        sorted.into_iter().partition(|&m| len / m >= MIN_BLOCKS);
    if warn && !skip.is_empty() {
        log::warn!(
            "skipping {} levels from {} up: fewer than {MIN_BLOCKS} blocks of {len} returns",
            skip.len(),
            skip[0]
        );
    }
    if keep.is_empty() {
        return Err(Error::InvalidInput(format!(
            "series of length {len} leaves fewer than {MIN_BLOCKS} blocks at every level"
        )));
    }
    Ok((keep, skip))
}

/// Fit and K-S test at every usable level (levels run in parallel, the
/// result keeps level order).
pub fn alpha_trajectory(
    series: &ReturnSeries,
    levels: &[usize],
    significance: f64,
    source_label: &str,
) -> Result<AlphaTrajectory> {
    let (keep, skipped) = usable_levels(series.len(), levels, true)?;
    let points = keep
        .par_iter()
        .map(|&m| {
            let agg = convolve_returns(series, m)?;
            fit_and_test(agg.returns(), agg.n_conv(), significance)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlphaTrajectory {
        points,
        source_label: source_label.to_string(),
        mean_dt: series.mean_dt(),
        skipped,
    })
}

/// Excess kurtosis of the aggregated series at every usable level.
pub fn kurtosis_trajectory(series: &ReturnSeries, levels: &[usize]) -> Result<Vec<KurtosisPoint>> {
    let (keep, _) = usable_levels(series.len(), levels, false)?;
    keep.iter()
        .map(|&m| {
            let agg = convolve_returns(series, m)?;
            Ok(KurtosisPoint {
                n_conv: agg.n_conv(),
                excess_kurtosis: excess_kurtosis(agg.returns())?,
            })
        })
        .collect()
}

/// First level from which `holds` is true at that level and every larger
/// one.
fn persistent_from<T>(
    points: &[T],
    level: impl Fn(&T) -> usize,
    holds: impl Fn(&T) -> bool,
) -> Option<usize> {
    let mut first = None;
    for p in points.iter().rev() {
        if holds(p) {
            first = Some(level(p));
        } else {
            break;
        }
    }
    first
}

/// Crossover level: the smallest swept level from which either the alpha
/// criterion or the kurtosis criterion holds at every larger level.
///
/// When the first kurtosis value is not positive there is no excess to
/// collapse and the kurtosis criterion holds everywhere.
pub fn detect_crossover(
    alpha_traj: &AlphaTrajectory,
    kurt_points: &[KurtosisPoint],
    config: &CrossoverConfig,
) -> Result<CrossoverReport> {
    if alpha_traj.points.is_empty() && kurt_points.is_empty() {
        return Err(Error::InvalidInput("both trajectories are empty".into()));
    }
    if !(config.trading_day_seconds > 0.0) {
        return Err(Error::param(
            "trading_day_seconds",
            format!("{} is not positive", config.trading_day_seconds),
        ));
    }
    let thr = config.alpha_threshold;
    let alpha_level = persistent_from(
        &alpha_traj.points,
        |p| p.n_conv,
        |p| p.params.alpha() >= thr,
    );
    let kurtosis_level = kurt_points.first().and_then(|first| {
        let k1 = first.excess_kurtosis;
        let cut = config.kurtosis_fraction * k1;
        persistent_from(
            kurt_points,
            |p| p.n_conv,
            |p| k1 <= 0.0 || p.excess_kurtosis < cut,
        )
    });
    let (n_c, criterion) = match (alpha_level, kurtosis_level) {
        (None, None) => {
            let last_alpha = alpha_traj.points.last().map(|p| p.params.alpha());
            let last_k = kurt_points.last().map(|p| p.excess_kurtosis);
            return Err(Error::NoCrossover(format!(
                "neither criterion holds at the largest level (alpha {last_alpha:?}, kurtosis {last_k:?})"
            )));
        }
        (Some(a), None) => (a, Criterion::Alpha),
        (None, Some(k)) => (k, Criterion::Kurtosis),
        (Some(a), Some(k)) if a < k => (a, Criterion::Alpha),
        (Some(a), Some(k)) if k < a => (k, Criterion::Kurtosis),
        (Some(a), Some(_)) => (a, Criterion::Both),
    };
    let criterion_text = match criterion {
        Criterion::Alpha => format!("fitted alpha >= {thr} from level {n_c} onwards"),
        Criterion::Kurtosis => format!(
            "excess kurtosis below {} of its first-level value from level {n_c} onwards",
            config.kurtosis_fraction
        ),
        Criterion::Both => format!(
            "fitted alpha >= {thr} and excess kurtosis below {} of its first-level value from level {n_c} onwards",
            config.kurtosis_fraction
        ),
    };
    let crossover_seconds = alpha_traj.mean_dt.map(|dt| n_c as f64 * dt);
    Ok(CrossoverReport {
        n_c,
        crossover_seconds,
        crossover_trading_days: crossover_seconds.map(|s| s / config.trading_day_seconds),
        criterion,
        criterion_text,
        alpha_level,
        kurtosis_level,
        kurtosis_points: kurt_points.to_vec(),
    })
}

/// One cell of a truncation batch.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationCell {
    pub length: usize,
    pub n_std: f64,
    pub seed: u64,
    /// Values kept after truncation.
    pub kept: Option<usize>,
    pub trajectory: Result<AlphaTrajectory>,
}

/// Simulated sets of each length are drawn from `gen`, truncated at `n_std`
/// sample standard deviations (self-consistent rule), and swept over
/// `levels`. One trajectory per length; errors stay inside their cell.
pub fn truncation_experiment(
    gen: &StableParams,
    lengths: &[usize],
    n_std: f64,
    levels: &[usize],
    seed: u64,
) -> Result<Vec<TruncationCell>> {
    truncation_batch(gen, lengths, &[n_std], levels, seed)
}

/// All `(length, n_std)` combinations. The random set depends only on the
/// master seed and the length, so every `n_std` truncates the same data.
pub fn truncation_batch(
    gen: &StableParams,
    lengths: &[usize],
    n_stds: &[f64],
    levels: &[usize],
    seed: u64,
) -> Result<Vec<TruncationCell>> {
    truncation_batch_with(gen, lengths, n_stds, levels, seed, SigmaRule::default())
}

/// [`truncation_batch`] with an explicit cutoff rule.
pub fn truncation_batch_with(
    gen: &StableParams,
    lengths: &[usize],
    n_stds: &[f64],
    levels: &[usize],
    seed: u64,
    rule: SigmaRule,
) -> Result<Vec<TruncationCell>> {
    if !gen.is_symmetric() {
        return Err(Error::param("gen.beta", "truncation needs a symmetric law"));
    }
    if lengths.is_empty() || n_stds.is_empty() || levels.is_empty() {
        return Err(Error::InvalidInput(
            "lengths, cutoffs and levels must be nonempty".into(),
        ));
    }
    let cells: Vec<(usize, f64)> = lengths
        .iter()
        .flat_map(|&l| n_stds.iter().map(move |&s| (l, s)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(length, n_std)| {
            let cell_seed = crate::seed::derive(seed, "truncation", length as u64);
            let run = || -> Result<(usize, AlphaTrajectory)> {
                let raw = sample(gen, length, cell_seed)?;
                let kept = truncate(&raw, n_std, rule)?;
                let n = kept.len();
                let series = ReturnSeries::new(kept, None)?;
                let label = format!("length={length} n_std={n_std}");
                Ok((n, alpha_trajectory(&series, levels, 0.05, &label)?))
            };
            match run() {
                Ok((n, t)) => TruncationCell {
                    length,
                    n_std,
                    seed: cell_seed,
                    kept: Some(n),
                    trajectory: Ok(t),
                },
                Err(e) => TruncationCell {
                    length,
                    n_std,
                    seed: cell_seed,
                    kept: None,
                    trajectory: Err(e),
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(n_conv: usize, alpha: f64) -> FitResult {
        FitResult {
            params: StableParams::new(alpha, 0.0, 1.0, 0.0).unwrap(),
            ks_statistic: 0.01,
            p_value: 0.5,
            reject_at_5pct: false,
            sample_size: 1000,
            n_conv,
        }
    }

    fn traj(points: &[(usize, f64)], mean_dt: Option<f64>) -> AlphaTrajectory {
        AlphaTrajectory {
            points: points.iter().map(|&(m, a)| fit(m, a)).collect(),
            source_label: "test".into(),
            mean_dt,
            skipped: vec![],
        }
    }

    #[test]
    fn levels_follow_the_table() {
        let t = table_levels();
        assert_eq!(t.len(), 19);
        assert_eq!(&t[..3], &[1, 10, 20]);
        let d = default_levels();
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(d.contains(&2700) && d.contains(&3000) && d.contains(&150));
        assert_eq!(level_label(1), "0/raw");
        assert_eq!(level_label(60), "60");
    }

    #[test]
    fn trading_day_conversion() {
        let t = traj(&[(1, 1.3), (100, 1.6), (2700, 2.0)], Some(19.3));
        let r = detect_crossover(&t, &[], &CrossoverConfig::default()).unwrap();
        assert_eq!(r.n_c, 2700);
        assert_eq!(r.criterion, Criterion::Alpha);
        assert_eq!(format!("{:.2}", r.crossover_trading_days.unwrap()), "2.23");
    }

    #[test]
    fn single_touch_does_not_count() {
        let t = traj(
            &[(1, 1.4), (10, 1.995), (20, 1.9), (30, 1.995), (40, 2.0)],
            None,
        );
        let r = detect_crossover(&t, &[], &CrossoverConfig::default()).unwrap();
        assert_eq!(r.n_c, 30);
        assert_eq!(r.crossover_seconds, None);
    }

    #[test]
    fn flat_gaussian_trajectory_crosses_at_first_level() {
        let t = traj(&[(5, 2.0), (10, 2.0)], Some(1.0));
        assert_eq!(
            detect_crossover(&t, &[], &CrossoverConfig::default())
                .unwrap()
                .n_c,
            5
        );
    }

    #[test]
    fn kurtosis_collapse() {
        let t = traj(&[(1, 1.5), (10, 1.6), (100, 1.7)], None);
        let k = [(1, 40.0), (10, 4.0), (100, 1.0)].map(|(n_conv, excess_kurtosis)| KurtosisPoint {
            n_conv,
            excess_kurtosis,
        });
        let r = detect_crossover(&t, &k, &CrossoverConfig::default()).unwrap();
        assert_eq!((r.n_c, r.criterion), (100, Criterion::Kurtosis));
    }

    #[test]
    fn no_crossover() {
        let t = traj(&[(1, 1.5), (10, 1.6)], None);
        assert!(matches!(
            detect_crossover(&t, &[], &CrossoverConfig::default()),
            Err(Error::NoCrossover(_))
        ));
    }

    #[test]
    fn coarse_levels_are_skipped() {
        let s = ReturnSeries::new(
            (0..1000).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect(),
            None,
        )
        .unwrap();
        let k = kurtosis_trajectory(&s, &[1, 5, 20]).unwrap();
        assert_eq!(k.iter().map(|p| p.n_conv).collect::<Vec<_>>(), vec![1, 5]);
        assert!(kurtosis_trajectory(&s, &[20, 50]).is_err());
    }
}
