//! Maximum-likelihood stable fits and Kolmogorov-Smirnov goodness of fit.
//!
//! The likelihood is maximized over `(alpha, beta, ln gamma, delta0)` with
//! `delta0` the location in the continuous (S0) coordinate, which keeps the
//! surface smooth through `alpha = 1`; the result is reported in the usual
//! S1 parameterization. Small samples are evaluated point by point, large
//! ones through a spline table of `ln f`.

mod init;
mod ks;
mod optimize;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stable::table::{safe_ln, LogPdfTable, DEFAULT_DS};
use crate::stable::{sample_with, QuadratureOptions, StableParams, StandardStable};

pub use crate::returns::excess_kurtosis;
pub use ks::{
    kolmogorov_survival, ks_pvalue, ks_statistic, ks_statistic_with, ks_test, KsOutcome,
    EXACT_CDF_LIMIT,
};

use init::quantile_start;
use optimize::NelderMead;

/// Smallest sample the fitter accepts.
pub const MIN_FIT_SIZE: usize = 100;
/// Lower end of the alpha search range (open).
pub const ALPHA_MIN: f64 = 0.1;

const CHUNK: usize = 1 << 14;

/// Tuning of [`fit_stable_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Samples up to this size use exact per-point densities.
    pub exact_limit: usize,
    pub max_evaluations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            exact_limit: 2_000,
            max_evaluations: 3_000,
        }
    }
}

/// Outcome of the likelihood search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableFit {
    pub params: StableParams,
    pub log_likelihood: f64,
    pub initial_log_likelihood: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// One row of a goodness-of-fit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: StableParams,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub reject_at_5pct: bool,
    pub sample_size: usize,
    pub n_conv: usize,
}

impl FitResult {
    /// Decision at another significance level.
    pub fn rejects_at(&self, significance: f64) -> bool {
        self.p_value < significance
    }
}

struct Likelihood<'a> {
    data: &'a [f64],
    exact: bool,
    opts: QuadratureOptions,
}

impl Likelihood<'_> {
    /// Log-likelihood at S0 parameters; `-inf` where the density cannot be
    /// evaluated.
    fn eval(&self, alpha: f64, beta: f64, gamma: f64, delta0: f64) -> f64 {
        let Ok(law) = StandardStable::new(alpha, beta, &self.opts) else {
            return f64::NEG_INFINITY;
        };
        let inv = 1.0 / gamma;
        let n = self.data.len() as f64;
        let sum = if self.exact {
            self.data
                .iter()
                .map(|&x| safe_ln(law.pdf((x - delta0) * inv)))
                .sum::<f64>()
        } else {
            let table = LogPdfTable::new(Arc::new(law), DEFAULT_DS);
            // chunk sums in fixed order: identical for any thread count
            let parts: Vec<f64> = self
                .data
                .par_chunks(CHUNK)
                .map(|c| c.iter().map(|&x| table.ln_pdf((x - delta0) * inv)).sum())
                .collect();
            parts.iter().sum()
        };
        sum - n * gamma.ln()
    }
}

/// Maximum-likelihood stable parameters of `samples`.
pub fn fit_stable(samples: &[f64]) -> Result<StableParams> {
    Ok(fit_stable_with(samples, &FitOptions::default())?.params)
}

pub fn fit_stable_with(samples: &[f64], opts: &FitOptions) -> Result<StableFit> {
    if samples.len() < MIN_FIT_SIZE {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_FIT_SIZE} samples to fit, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let start = quantile_start(&sorted)?;
    let like = Likelihood {
        data: &sorted,
        exact: sorted.len() <= opts.exact_limit,
        opts: QuadratureOptions::default(),
    };
    let n = sorted.len() as f64;
    let g0 = start.gamma;
    // coordinates: alpha, beta, ln(gamma / g0), delta0 / g0
    let decode = |x: &[f64]| {
        (
            x[0].clamp(ALPHA_MIN + 1e-9, 2.0),
            x[1].clamp(-1.0, 1.0),
            g0 * x[2].exp(),
            g0 * x[3],
        )
    };
    let outside = |x: &[f64]| {
        (x[0] - 2.0).max(ALPHA_MIN + 1e-9 - x[0]).max(0.0) + (x[1].abs() - 1.0).max(0.0)
    };
    let mut objective = |x: &[f64]| {
        let (a, b, g, d) = decode(x);
        -like.eval(a, b, g, d) + 10.0 * n * outside(x)
    };
    let x0 = [start.alpha, start.beta, 0.0, start.delta0 / g0];
    let initial = like.eval(start.alpha, start.beta, start.gamma, start.delta0);
    if !initial.is_finite() {
        return Err(Error::OptimizerFailure(format!(
            "likelihood not finite at the starting point {start:?}"
        )));
    }
    let steps = [
        if start.alpha > 1.8 { -0.1 } else { 0.1 },
        if start.beta > 0.5 { -0.2 } else { 0.2 },
        0.1,
        0.1,
    ];
    let nm = NelderMead {
        max_evals: opts.max_evaluations,
        ..NelderMead::default()
    };
    let m = nm.minimize(&mut objective, &x0, &steps);
    log::debug!(
        "likelihood search: {} evaluations, objective {}, converged {}",
        m.evals,
        m.f,
        m.converged
    );
    let (alpha, mut beta, gamma, delta0) = decode(&m.x);
    let log_likelihood = like.eval(alpha, beta, gamma, delta0);
    if !(log_likelihood >= initial) {
        return Err(Error::OptimizerFailure(format!(
            "no improvement over the starting point after {} evaluations \
             (start {start:?}, log-likelihood {initial} -> {log_likelihood})",
            m.evals
        )));
    }
    if alpha == 2.0 {
        // skewness has no effect on the Gaussian law
        beta = 0.0;
    }
    Ok(StableFit {
        params: StableParams::from_s0(alpha, beta, gamma, delta0)?,
        log_likelihood,
        initial_log_likelihood: initial,
        evaluations: m.evals,
        converged: m.converged,
    })
}

/// Fits, then tests the fit with K-S at `significance`.
pub fn fit_and_test(samples: &[f64], n_conv: usize, significance: f64) -> Result<FitResult> {
    let params = fit_stable(samples)?;
    let ks = ks_test(samples, &params, significance)?;
    Ok(FitResult {
        params,
        ks_statistic: ks.statistic,
        p_value: ks.p_value,
        reject_at_5pct: ks.p_value < 0.05,
        sample_size: samples.len(),
        n_conv,
    })
}

/// Parametric-bootstrap p-value of a fitted K-S statistic: each replicate
/// draws a sample of the same size from `fitted`, refits, and recomputes
/// the statistic against its own fit. Returns `(1 + #{D_b >= D}) / (B + 1)`.
pub fn bootstrap_pvalue(
    statistic: f64,
    sample_size: usize,
    fitted: &StableParams,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    if replicates == 0 {
        return Err(Error::param("replicates", "must be at least 1"));
    }
    let exceed: Vec<bool> = (0..replicates)
        .into_par_iter()
        .map(|b| -> Result<bool> {
            let mut rng =
                ChaCha8Rng::seed_from_u64(crate::seed::derive(seed, "bootstrap", b as u64));
            let sim = sample_with(fitted, sample_size, &mut rng);
            let refit = fit_stable(&sim)?;
            Ok(ks_test(&sim, &refit, 0.05)?.statistic >= statistic)
        })
        .collect::<Result<_>>()?;
    let hits = exceed.iter().filter(|&&e| e).count();
    Ok((1 + hits) as f64 / (replicates + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::sample;

    #[test]
    fn too_small_sample_is_refused() {
        assert!(matches!(
            fit_stable(&[1.0; 50]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn recovers_parameters_of_a_small_sample() {
        let truth = StableParams::new(1.6, 0.0, 1.0, 0.0).unwrap();
        let xs = sample(&truth, 1500, 3).unwrap();
        let fit = fit_stable_with(&xs, &FitOptions::default()).unwrap();
        assert!(fit.log_likelihood >= fit.initial_log_likelihood);
        let p = fit.params;
        assert!((p.alpha() - 1.6).abs() < 0.15, "{p:?}");
        assert!((p.gamma() - 1.0).abs() < 0.1, "{p:?}");
        assert!(p.delta().abs() < 0.15, "{p:?}");
    }

    #[test]
    fn deterministic() {
        let truth = StableParams::new(1.3, 0.3, 2.0, 1.0).unwrap();
        let xs = sample(&truth, 500, 9).unwrap();
        assert_eq!(fit_stable(&xs).unwrap(), fit_stable(&xs).unwrap());
    }
}
