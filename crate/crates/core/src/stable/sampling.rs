//! Chambers-Mallows-Stuck generator for S1 stable variates.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::params::StableParams;
use crate::error::{Error, Result};

/// One standard (`gamma = 1`, `delta = 0`) S1 variate.
pub(crate) fn standard_variate<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let v = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * (u - 0.5);
        }
    };
    let w: f64 = loop {
        let w: f64 = Exp1.sample(rng);
        if w > 0.0 {
            break w;
        }
    };
    if alpha == 1.0 {
        let a = FRAC_PI_2 + beta * v;
        return FRAC_2_PI * (a * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / a).ln());
    }
    let t = beta * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let av = alpha * (v + b);
    s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Maps a standard variate to the law with the given scale and location.
pub(crate) fn scale_variate(params: &StableParams, z: f64) -> f64 {
    let g = params.gamma();
    let shift = if params.alpha() == 1.0 {
        FRAC_2_PI * params.beta() * g * g.ln()
    } else {
        0.0
    };
    g * z + shift + params.delta()
}

/// Draws `n` variates with a ChaCha8 stream seeded from `seed`.
pub fn sample(params: &StableParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_with(params, n, &mut rng))
}

/// Draws `n` variates from an existing generator.
pub fn sample_with<R: Rng + ?Sized>(params: &StableParams, n: usize, rng: &mut R) -> Vec<f64> {
    let (a, b) = (params.alpha(), params.beta());
    (0..n)
        .map(|_| scale_variate(params, standard_variate(a, b, rng)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let p = StableParams::new(1.5, 0.3, 2.0, 1.0).unwrap();
        assert_eq!(sample(&p, 1000, 9).unwrap(), sample(&p, 1000, 9).unwrap());
        assert_ne!(sample(&p, 1000, 9).unwrap(), sample(&p, 1000, 10).unwrap());
    }

    #[test]
    fn zero_count_rejected() {
        let p = StableParams::standard(1.5, 0.0).unwrap();
        assert!(sample(&p, 0, 1).is_err());
    }

    #[test]
    fn gaussian_variance_is_two_gamma_squared() {
        let p = StableParams::new(2.0, 0.0, 1.5, 0.0).unwrap();
        let xs = sample(&p, 200_000, 3).unwrap();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((v - 4.5).abs() < 0.05, "{v}");
    }

    #[test]
    fn cauchy_quartiles() {
        let p = StableParams::standard(1.0, 0.0).unwrap();
        let mut xs = sample(&p, 200_000, 5).unwrap();
        xs.sort_by(f64::total_cmp);
        let q3 = xs[150_000];
        assert!((q3 - 1.0).abs() < 0.02, "{q3}");
    }
}
