//! Truncated Levy flights: the hard cutoff `c P_L(x) 1{|x| <= l}` and the
//! smooth exponential cutoff of Koponen.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stable::quadrature::gl16;
use crate::stable::{sample_with, DensityGrid, StableDensity, StableParams};

/// Smallest acceptance rate the rejection sampler will put up with.
pub const MIN_ACCEPTANCE: f64 = 1e-6;

/// Symmetric stable law restricted to `[-l, l]` and renormalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardTLFParams {
    base: StableParams,
    cutoff_l: f64,
    norm_c: f64,
}

impl HardTLFParams {
    /// Truncation of `base` (which must have `beta = 0`) at `|x| <= cutoff_l`.
    pub fn new(base: StableParams, cutoff_l: f64) -> Result<Self> {
        if !base.is_symmetric() {
            return Err(Error::param("base.beta", "hard truncation needs beta = 0"));
        }
        if !(cutoff_l > 0.0) {
            return Err(Error::param(
                "cutoff_l",
                format!("{cutoff_l} is not positive"),
            ));
        }
        let norm_c = if cutoff_l.is_infinite() {
            1.0
        } else {
            let d = StableDensity::new(base)?;
            1.0 / (d.cdf(cutoff_l) - d.cdf(-cutoff_l))
        };
        if !norm_c.is_finite() {
            return Err(Error::param(
                "cutoff_l",
                format!("{cutoff_l} keeps no probability mass"),
            ));
        }
        Ok(Self {
            base,
            cutoff_l,
            norm_c,
        })
    }

    /// Cutoff at `n_std` population standard deviations of `reference`.
    pub fn from_n_std(base: StableParams, n_std: f64, reference: &[f64]) -> Result<Self> {
        Self::new(base, n_std * population_std(reference)?)
    }

    pub fn base(&self) -> &StableParams {
        &self.base
    }

    pub fn cutoff_l(&self) -> f64 {
        self.cutoff_l
    }

    /// `c = 1 / (F(l) - F(-l))`.
    pub fn norm_c(&self) -> f64 {
        self.norm_c
    }

    /// Truncated density `c P_L(x)` inside the cutoff, 0 outside.
    pub fn pdf(&self, xs: &[f64]) -> Result<DensityGrid> {
        let d = StableDensity::new(self.base)?;
        let (l, c) = (self.cutoff_l, self.norm_c);
        let lo = d.cdf(-l);
        DensityGrid::from_fn(
            xs,
            |x| if x.abs() <= l { c * d.pdf(x) } else { 0.0 },
            |x| (c * (d.cdf(x.clamp(-l, l)) - lo)).clamp(0.0, 1.0),
        )
    }
}

fn population_std(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("reference sample is empty".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Keeps the elements with `|x| <= n_std * sigma`, `sigma` being the
/// population standard deviation of `samples`. Order is preserved.
pub fn hard_truncate(samples: &[f64], n_std: f64) -> Result<Vec<f64>> {
    if !(n_std > 0.0) {
        return Err(Error::param("n_std", format!("{n_std} is not positive")));
    }
    if n_std.is_infinite() {
        if samples.is_empty() {
            return Err(Error::InvalidInput("no samples to truncate".into()));
        }
        return Ok(samples.to_vec());
    }
    let threshold = n_std * population_std(samples)?;
    let kept: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|x| x.abs() <= threshold)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no sample within {n_std} standard deviations ({threshold:e})"
        )));
    }
    Ok(kept)
}

/// Which standard deviation an `n_std` cutoff refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaRule {
    /// One pass with the deviation of the untruncated input.
    Input,
    /// Repeat the cut with the deviation of what is left until nothing
    /// more is removed, so every kept value lies within `n_std` deviations
    /// of the kept set. For heavy tails the single-pass deviation is set by
    /// the few largest draws and varies wildly between samples; the fixed
    /// point does not.
    #[default]
    SelfConsistent,
}

impl std::str::FromStr for SigmaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(Self::Input),
            "self-consistent" => Ok(Self::SelfConsistent),
            _ => Err(Error::param(
                "sigma_rule",
                format!("`{s}` is not `input` or `self-consistent`"),
            )),
        }
    }
}

/// [`hard_truncate`] repeated on its own output until it keeps everything.
pub fn sigma_clip(samples: &[f64], n_std: f64) -> Result<Vec<f64>> {
    let mut kept = hard_truncate(samples, n_std)?;
    loop {
        let next = hard_truncate(&kept, n_std)?;
        if next.len() == kept.len() {
            return Ok(kept);
        }
        kept = next;
    }
}

/// Cut at `n_std` deviations under `rule`.
pub fn truncate(samples: &[f64], n_std: f64, rule: SigmaRule) -> Result<Vec<f64>> {
    match rule {
        SigmaRule::Input => hard_truncate(samples, n_std),
        SigmaRule::SelfConsistent => sigma_clip(samples, n_std),
    }
}

/// Draws `n` variates from the hard-truncated law by rejection from the
/// base stable sampler.
pub fn sample_hard_tlf(params: &HardTLFParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let acceptance = 1.0 / params.norm_c;
    if acceptance < MIN_ACCEPTANCE {
        return Err(Error::RejectionBudget { rate: acceptance });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = params.cutoff_l;
    let mut out = Vec::with_capacity(n);
    let mut drawn = 0usize;
    while out.len() < n {
        let need = n - out.len();
        let batch = ((need as f64 / acceptance) * 1.05).ceil() as usize + 16;
        drawn += batch;
        out.extend(
            sample_with(&params.base, batch, &mut rng)
                .into_iter()
                .filter(|x| x.abs() <= l)
                .take(need),
        );
        // the numerical acceptance estimate can be optimistic; guard anyway
        if drawn as f64 * MIN_ACCEPTANCE > 10.0 + out.len() as f64 {
            return Err(Error::RejectionBudget {
                rate: out.len() as f64 / drawn as f64,
            });
        }
    }
    Ok(out)
}

/// Symmetric Levy law with an exponential cutoff `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoponenParams {
    scale_c: f64,
    alpha: f64,
    lambda: f64,
}

impl KoponenParams {
    /// `alpha = 1` is excluded: the normalizing `1 / cos(pi alpha / 2)`
    /// has a pole there.
    pub fn new(scale_c: f64, alpha: f64, lambda: f64) -> Result<Self> {
        if !(scale_c > 0.0 && scale_c.is_finite()) {
            return Err(Error::param(
                "scale_c",
                format!("{scale_c} is not positive"),
            ));
        }
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(Error::param(
                "alpha",
                format!("{alpha} not in (0, 1) or (1, 2)"),
            ));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} is negative")));
        }
        Ok(Self {
            scale_c,
            alpha,
            lambda,
        })
    }

    pub fn scale_c(&self) -> f64 {
        self.scale_c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The `lambda = 0` law: symmetric stable with scale `scale_c`.
    pub fn stable_limit(&self) -> StableParams {
        StableParams::new(self.alpha, 0.0, self.scale_c, 0.0).expect("validated")
    }

    /// Variance `-c^a a (a - 1) lambda^(a - 2) / cos(pi a / 2)`; infinite at
    /// `lambda = 0`.
    pub fn variance(&self) -> f64 {
        let (a, c, l) = (self.alpha, self.scale_c, self.lambda);
        if l == 0.0 {
            return f64::INFINITY;
        }
        -c.powf(a) * a * (a - 1.0) * l.powf(a - 2.0) / (FRAC_PI_2 * a).cos()
    }
}

/// `ln phi(t) = c^a / cos(pi a / 2) * (lambda^a - (t^2 + lambda^2)^(a/2) cos(a atan(|t| / lambda)))`.
///
/// The law is symmetric, so the value is real.
pub fn koponen_log_char_fn(params: &KoponenParams, t: f64) -> f64 {
    let (a, c, l) = (params.alpha, params.scale_c, params.lambda);
    let t = t.abs();
    if t == 0.0 {
        return 0.0;
    }
    let cos_a = (FRAC_PI_2 * a).cos();
    let ca = c.powf(a);
    if l == 0.0 {
        return -(c * t).powf(a);
    }
    // with r = |t| / lambda the bracket is lambda^a (1 - E cos(a atan r)),
    // E = (1 + r^2)^(a/2); expanded so small r does not cancel
    let r = t / l;
    let x = 0.5 * a * (r * r).ln_1p();
    let s = (0.5 * a * r.atan()).sin();
    let inner = 2.0 * s * s * x.exp() - x.exp_m1();
    ca * l.powf(a) * inner / cos_a
}

/// Density and distribution function by cosine/sine inversion of the
/// Koponen characteristic function.
pub fn koponen_pdf(params: &KoponenParams, xs: &[f64]) -> Result<DensityGrid> {
    crate::stable::validate_abscissae(xs)?;
    let inv = KoponenInversion::new(*params);
    let values: Vec<(f64, f64)> = xs.iter().map(|&x| inv.eval(x)).collect::<Result<_>>()?;
    let (pdf, cdf) = values.into_iter().unzip();
    DensityGrid::from_values(xs, pdf, cdf)
}

const KOPONEN_NODE_BUDGET: usize = 400_000;

struct KoponenInversion {
    params: KoponenParams,
    u_max: f64,
}

impl KoponenInversion {
    fn new(params: KoponenParams) -> Self {
        // in u = c t, |phi| <= exp(-u^a) up to the cutoff's extra decay
        Self {
            params,
            u_max: 39.2f64.powf(1.0 / params.alpha),
        }
    }

    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let c = self.params.scale_c;
        let z = x / c;
        let phi = |u: f64| koponen_log_char_fn(&self.params, u / c).exp();
        let rule = gl16();
        let mut f = 0.0;
        let mut g = 0.0;
        let mut add = |a: f64, b: f64| {
            for (&node, &w) in rule.nodes.iter().zip(&rule.weights) {
                let u = 0.5 * (b - a) * node + 0.5 * (a + b);
                let wu = 0.5 * (b - a) * w * phi(u);
                f += wu * (u * z).cos();
                // sin(u z) / u, continuous at 0
                g += wu * if u * z == 0.0 { z } else { (u * z).sin() / u };
            }
        };
        // geometric panels resolve the |t|^alpha cusp of the lambda = 0 law;
        // no panel may span more than an eighth of a period of cos(u z)
        let width = (0.5f64).min(PI / (4.0 * z.abs().max(1e-300)));
        let mut a = 0.0;
        let mut b = 1e-12f64.min(self.u_max);
        add(a, b);
        while b < 1.0 {
            a = b;
            b = (2.0 * b).min(1.0);
            let pieces = ((b - a) / width).ceil().max(1.0) as usize;
            let step = (b - a) / pieces as f64;
            for k in 0..pieces {
                add(a + step * k as f64, a + step * (k + 1) as f64);
            }
        }
        let panels = ((self.u_max - 1.0).max(0.0) / width).ceil();
        if panels * 16.0 > KOPONEN_NODE_BUDGET as f64 {
            return Err(Error::QuadratureFailure(format!(
                "x={x}: inversion needs more than {KOPONEN_NODE_BUDGET} nodes"
            )));
        }
        let panels = panels as usize;
        let h = (self.u_max - 1.0) / panels.max(1) as f64;
        for i in 0..panels {
            let a = 1.0 + h * i as f64;
            add(a, a + h);
        }
        Ok((f / (PI * c), 0.5 + g / PI))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_clip_reaches_a_fixed_point() {
        let xs = [1.0, -2.0, 30.0, 0.5, -0.7, 1.5, 2.5, -1.2];
        let once = hard_truncate(&xs, 2.0).unwrap();
        let fixed = sigma_clip(&xs, 2.0).unwrap();
        assert!(fixed.len() <= once.len());
        assert_eq!(hard_truncate(&fixed, 2.0).unwrap(), fixed);
        assert_eq!(truncate(&xs, 2.0, SigmaRule::Input).unwrap(), once);
        assert_eq!(sigma_clip(&xs, f64::INFINITY).unwrap(), xs.to_vec());
        assert_eq!(
            "self-consistent".parse::<SigmaRule>().unwrap(),
            SigmaRule::SelfConsistent
        );
        assert!("both".parse::<SigmaRule>().is_err());
    }

    #[test]
    fn truncation_filter() {
        let s = [1.0, -2.0, 30.0];
        // population sigma of {1, -2, 30} is 14.43
        assert_eq!(hard_truncate(&s, 0.1).unwrap(), vec![1.0]);
        assert_eq!(hard_truncate(&s, f64::INFINITY).unwrap(), s.to_vec());
        assert!(matches!(
            hard_truncate(&[3.0, -3.0], 0.5),
            Err(Error::EmptyResult(_))
        ));
    }

    #[test]
    fn samples_respect_cutoff_and_seed() {
        let base = StableParams::new(1.4, 0.0, 1.0, 0.0).unwrap();
        let p = HardTLFParams::new(base, 3.0).unwrap();
        assert!(p.norm_c() > 1.0);
        let a = sample_hard_tlf(&p, 5000, 11).unwrap();
        assert_eq!(a.len(), 5000);
        assert!(a.iter().all(|x| x.abs() <= 3.0));
        assert_eq!(a, sample_hard_tlf(&p, 5000, 11).unwrap());
    }

    #[test]
    fn pathological_cutoff_is_refused() {
        let base = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        let p = HardTLFParams::new(base, 1e-7).unwrap();
        assert!(matches!(
            sample_hard_tlf(&p, 10, 1),
            Err(Error::RejectionBudget { .. })
        ));
    }

    #[test]
    fn skewed_base_rejected() {
        let base = StableParams::new(1.5, 0.2, 1.0, 0.0).unwrap();
        assert!(HardTLFParams::new(base, 5.0).is_err());
    }

    #[test]
    fn koponen_normalization_and_limit() {
        let p = KoponenParams::new(1.0, 1.5, 0.5).unwrap();
        assert_eq!(koponen_log_char_fn(&p, 0.0), 0.0);
        let p0 = KoponenParams::new(1.0, 1.5, 0.0).unwrap();
        assert!((koponen_log_char_fn(&p0, 1.0) + 1.0).abs() < 1e-15);
        assert!(KoponenParams::new(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn koponen_zero_cutoff_matches_stable() {
        let p = KoponenParams::new(1.3, 1.5, 0.0).unwrap();
        let xs: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.25).collect();
        let k = koponen_pdf(&p, &xs).unwrap();
        let s = crate::stable::pdf(&p.stable_limit(), &xs).unwrap();
        for i in 0..xs.len() {
            assert!(
                (k.pdf_values[i] - s.pdf_values[i]).abs() < 1e-8,
                "{}",
                xs[i]
            );
            assert!(
                (k.cdf_values[i] - s.cdf_values[i]).abs() < 1e-8,
                "{}",
                xs[i]
            );
        }
    }

    #[test]
    fn koponen_variance_formula() {
        let p = KoponenParams::new(1.0, 1.5, 0.2).unwrap();
        assert!((p.variance() - 2.372).abs() < 1e-3);
    }
}
