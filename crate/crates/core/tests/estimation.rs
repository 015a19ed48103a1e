//! Maximum-likelihood fits, kurtosis and the K-S test.

use hfstable::estimation::{
    bootstrap_pvalue, excess_kurtosis, fit_and_test, fit_stable, ks_pvalue, ks_statistic_with,
};
use hfstable::seed::derive;
use hfstable::stable::{sample, StableParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

const MASTER: u64 = 77;

#[test]
fn gaussian_sample_fits_alpha_two() {
    let p = StableParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let xs = sample(&p, 100_000, derive(MASTER, "gauss", 0)).unwrap();
    let fit = fit_stable(&xs).unwrap();
    assert!((1.95..=2.0).contains(&fit.alpha()), "{fit:?}");
    assert!(fit.delta().abs() < 0.02, "{fit:?}");
    assert!((fit.gamma() - 1.0).abs() < 0.02, "{fit:?}");
}

#[test]
fn cauchy_sample_fits() {
    let p = StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let xs = sample(&p, 100_000, derive(MASTER, "cauchy", 0)).unwrap();
    let fit = fit_stable(&xs).unwrap();
    assert!((fit.alpha() - 1.0).abs() < 0.05, "{fit:?}");
    assert!((fit.gamma() - 1.0).abs() < 0.05, "{fit:?}");
}

#[test]
fn skewed_shifted_sample_fits() {
    let p = StableParams::new(1.5, 0.5, 2.0, -1.0).unwrap();
    let xs = sample(&p, 100_000, derive(MASTER, "skewed", 0)).unwrap();
    let fit = fit_and_test(&xs, 1, 0.05).unwrap();
    let q = fit.params;
    assert!((q.alpha() - 1.5).abs() < 0.05, "{q:?}");
    assert!((q.beta() - 0.5).abs() < 0.1, "{q:?}");
    assert!((q.gamma() - 2.0).abs() < 0.05, "{q:?}");
    assert!((q.delta() + 1.0).abs() < 0.05, "{q:?}");
    assert_eq!(fit.sample_size, 100_000);
    assert!(fit.ks_statistic < 0.01, "{}", fit.ks_statistic);
}

#[test]
fn kurtosis_of_uniform_and_laplace() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(MASTER, "kurtosis", 0));
    let u: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
    let ku = excess_kurtosis(&u).unwrap();
    assert!((ku + 1.2).abs() < 0.02, "{ku}");
    let l: Vec<f64> = (0..1_000_000)
        .map(|_| {
            let e: f64 = -(1.0 - rng.random::<f64>()).ln();
            if rng.random::<bool>() {
                e
            } else {
                -e
            }
        })
        .collect();
    let kl = excess_kurtosis(&l).unwrap();
    assert!((kl - 3.0).abs() < 0.1, "{kl}");
}

#[test]
fn ks_pvalue_is_uniform_under_the_null() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(derive(MASTER, "ks-null", 0));
    let mut rejections = 0;
    for _ in 0..400 {
        let xs: Vec<f64> = (0..500)
            .map(|_| normal.inverse_cdf(rng.random::<f64>()))
            .collect();
        let d = ks_statistic_with(&xs, |x| normal.cdf(x)).unwrap();
        if ks_pvalue(d, xs.len()) < 0.05 {
            rejections += 1;
        }
    }
    // Binomial(400, 0.05): mean 20, sd 4.4
    assert!((6..=36).contains(&rejections), "{rejections}");
}

#[test]
fn bootstrap_pvalue_is_a_probability() {
    let p = StableParams::new(1.6, 0.0, 1.0, 0.0).unwrap();
    let xs = sample(&p, 300, derive(MASTER, "boot", 0)).unwrap();
    let fit = fit_and_test(&xs, 1, 0.05).unwrap();
    let a = bootstrap_pvalue(fit.ks_statistic, 300, &fit.params, 9, 3).unwrap();
    let b = bootstrap_pvalue(fit.ks_statistic, 300, &fit.params, 9, 3).unwrap();
    assert_eq!(a, b);
    assert!(a > 0.0 && a <= 1.0);
    // the smallest value is 1 / (B + 1)
    assert!(a >= 0.1 - 1e-12);
    assert!(bootstrap_pvalue(fit.ks_statistic, 300, &fit.params, 0, 3).is_err());
}

/// `sup_x |F_n(x) - F(x)|` evaluated at every jump from both sides.
fn brute_ks(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for &x in xs {
        let at = xs.iter().filter(|&&y| y <= x).count() as f64 / n;
        let before = xs.iter().filter(|&&y| y < x).count() as f64 / n;
        let f = cdf(x);
        d = d.max((at - f).abs()).max((before - f).abs());
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ks_statistic_matches_the_definition(
        xs in prop::collection::vec(prop::sample::select(vec![-2.0, -0.5, 0.0, 0.25, 1.0, 3.0]), 1..40)
            .prop_flat_map(|ties| (Just(ties), prop::collection::vec(-4.0f64..4.0, 0..40)))
    ) {
        let (ties, free) = xs;
        let all: Vec<f64> = ties.into_iter().chain(free).collect();
        let normal = Normal::new(0.3, 1.2).unwrap();
        let fast = ks_statistic_with(&all, |x| normal.cdf(x)).unwrap();
        let slow = brute_ks(&all, |x| normal.cdf(x));
        prop_assert!((fast - slow).abs() < 1e-12, "{} vs {}", fast, slow);
    }
}
