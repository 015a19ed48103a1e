//! Hard-truncated and exponentially truncated Levy laws.

use std::f64::consts::FRAC_PI_2;

use hfstable::estimation::ks_statistic_with;
use hfstable::stable::{pdf, StableDensity, StableParams};
use hfstable::tlf::{
    hard_truncate, koponen_log_char_fn, koponen_pdf, sample_hard_tlf, sigma_clip, HardTLFParams,
    KoponenParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt()
}

#[test]
fn truncation_keeps_exactly_the_inner_sample() {
    let p = StableParams::new(1.4, 0.0, 1.0, 0.0).unwrap();
    let xs = hfstable::stable::sample(&p, 50_000, 11).unwrap();
    let sigma = population_std(&xs);
    for n_std in [0.1, 1.0, 3.0, 10.0] {
        let kept = hard_truncate(&xs, n_std).unwrap();
        // oracle: count of the sorted magnitudes below the threshold
        let mut mags: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        mags.sort_by(f64::total_cmp);
        let want = mags.partition_point(|&m| m <= n_std * sigma);
        assert_eq!(kept.len(), want, "n_std {n_std}");
        assert!(kept.iter().all(|x| x.abs() <= n_std * sigma));
    }
    assert_eq!(hard_truncate(&xs, f64::INFINITY).unwrap(), xs);
    assert!(hard_truncate(&xs, 0.0).is_err());
}

#[test]
fn sigma_clip_is_its_own_fixed_point() {
    let p = StableParams::new(1.2, 0.0, 1.0, 0.0).unwrap();
    let xs = hfstable::stable::sample(&p, 20_000, 3).unwrap();
    let clipped = sigma_clip(&xs, 5.0).unwrap();
    assert_eq!(hard_truncate(&clipped, 5.0).unwrap(), clipped);
    assert!(clipped.len() < hard_truncate(&xs, 5.0).unwrap().len());
}

#[test]
fn truncated_sampler_has_the_truncated_variance() {
    let base = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
    let tlf = HardTLFParams::new(base, 10.0).unwrap();
    let xs = sample_hard_tlf(&tlf, 400_000, 21).unwrap();
    assert!(xs.iter().all(|x| x.abs() <= 10.0));
    // variance by trapezoid integration of c x^2 P_L(x) on [-10, 10]
    let h = 1e-3;
    let grid: Vec<f64> = (0..=20_000).map(|i| -10.0 + h * i as f64).collect();
    let d = pdf(&base, &grid).unwrap();
    let f: Vec<f64> = grid
        .iter()
        .zip(&d.pdf_values)
        .map(|(x, p)| tlf.norm_c() * x * x * p)
        .collect();
    let want: f64 = f.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    assert!((var / want - 1.0).abs() < 0.05, "{var} vs {want}");
    // and the normalization is the inverse retained mass
    let law = StableDensity::new(base).unwrap();
    let mass = law.cdf(10.0) - law.cdf(-10.0);
    assert!((tlf.norm_c() * mass - 1.0).abs() < 1e-12);
}

#[test]
fn infinite_cutoff_is_the_stable_law() {
    let base = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
    let tlf = HardTLFParams::new(base, f64::INFINITY).unwrap();
    assert_eq!(tlf.norm_c(), 1.0);
    let xs = sample_hard_tlf(&tlf, 5_000, 8).unwrap();
    let law = StableDensity::new(base).unwrap();
    let d = ks_statistic_with(&xs, |x| law.cdf(x)).unwrap();
    // 1.63 / sqrt(n) is the 1% critical value
    assert!(d < 1.63 / (5_000f64).sqrt(), "{d}");
    assert!(HardTLFParams::new(StableParams::new(1.5, 0.3, 1.0, 0.0).unwrap(), 5.0).is_err());
}

/// `c^a / cos(pi a / 2) (lambda^a - Re((lambda + i t)^a))`.
fn koponen_oracle(c: f64, a: f64, lambda: f64, t: f64) -> f64 {
    let z = Complex64::new(lambda, t).powf(a);
    c.powf(a) / (FRAC_PI_2 * a).cos() * (lambda.powf(a) - z.re)
}

#[test]
fn koponen_characteristic_function() {
    let p = KoponenParams::new(1.0, 1.5, 0.5).unwrap();
    assert_eq!(koponen_log_char_fn(&p, 0.0), 0.0);
    let want = koponen_oracle(1.0, 1.5, 0.5, 2.0);
    assert!(
        (koponen_log_char_fn(&p, 2.0) - want).abs() < 1e-12,
        "{want}"
    );
    // the complex power cancels badly near 0, where -var t^2 / 2 is exact
    // to O(t^3)
    let tiny = koponen_log_char_fn(&p, 1e-6);
    assert!(
        (tiny / (-0.5 * p.variance() * 1e-12) - 1.0).abs() < 1e-5,
        "{tiny}"
    );
    for t in [1e-3, 0.1, 7.0, 300.0] {
        let want = koponen_oracle(1.0, 1.5, 0.5, t);
        let got = koponen_log_char_fn(&p, t);
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1e-12),
            "t={t}: {got} vs {want}"
        );
    }
    // lambda = 0 is the stable law
    let s = KoponenParams::new(2.0, 1.5, 0.0).unwrap();
    assert!((koponen_log_char_fn(&s, 1.3) + (2.0f64 * 1.3).powf(1.5)).abs() < 1e-12);
    assert!(s.variance().is_infinite());
}

#[test]
fn koponen_variance_is_the_curvature_at_zero() {
    let p = KoponenParams::new(1.0, 1.5, 0.5).unwrap();
    let h = 1e-3;
    let second = (koponen_oracle(1.0, 1.5, 0.5, h) - 2.0 * koponen_oracle(1.0, 1.5, 0.5, 0.0)
        + koponen_oracle(1.0, 1.5, 0.5, -h))
        / (h * h);
    assert!(
        (p.variance() + second).abs() < 1e-5 * p.variance(),
        "{} vs {}",
        p.variance(),
        -second
    );
}

#[test]
fn koponen_density_near_the_origin_follows_the_stable_law() {
    let p = KoponenParams::new(1.0, 1.5, 0.05).unwrap();
    let xs = [0.0, 0.5, 1.0];
    let k = koponen_pdf(&p, &xs).unwrap();
    let s = pdf(&p.stable_limit(), &xs).unwrap();
    for i in 0..xs.len() {
        let r = k.pdf_values[i] / s.pdf_values[i];
        assert!((r - 1.0).abs() < 0.05, "x={}: ratio {r}", xs[i]);
    }
    // far out the exponential cutoff wins
    for x in [30.0, 100.0, 150.0] {
        let far = koponen_pdf(&p, &[x]).unwrap().pdf_values[0];
        let stable_far = pdf(&p.stable_limit(), &[x]).unwrap().pdf_values[0];
        let damping = (-p.lambda() * x).exp();
        assert!(
            far > 0.5 * damping * stable_far && far < 2.0 * damping * stable_far,
            "x={x}: {far:e}"
        );
    }
}

#[test]
fn koponen_density_integrates_to_its_variance() {
    let p = KoponenParams::new(1.0, 1.5, 0.5).unwrap();
    let h = 0.01;
    let grid: Vec<f64> = (0..=12_000).map(|i| -60.0 + h * i as f64).collect();
    let d = koponen_pdf(&p, &grid).unwrap();
    let mass = d.trapezoid_mass();
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    let f: Vec<f64> = grid
        .iter()
        .zip(&d.pdf_values)
        .map(|(x, v)| x * x * v)
        .collect();
    let var: f64 = f.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    assert!(
        (var / p.variance() - 1.0).abs() < 0.01,
        "{var} vs {}",
        p.variance()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_never_widens(xs in prop::collection::vec(-1e6f64..1e6, 2..200), n_std in 0.5f64..20.0) {
        if let Ok(kept) = hard_truncate(&xs, n_std) {
            let t = n_std * population_std(&xs);
            prop_assert!(kept.iter().all(|x| x.abs() <= t));
            prop_assert_eq!(kept.len(), xs.iter().filter(|x| x.abs() <= t).count());
            if let Ok(clipped) = sigma_clip(&xs, n_std) {
                prop_assert!(clipped.len() <= kept.len());
            }
        }
    }

    #[test]
    fn koponen_matches_the_complex_power(alpha in 0.2f64..1.95, lambda in 0.01f64..5.0, t in -50.0f64..50.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = KoponenParams::new(1.0, alpha, lambda).unwrap();
        let want = koponen_oracle(1.0, alpha, lambda, t.abs());
        let got = koponen_log_char_fn(&p, t);
        prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-10), "{} vs {}", got, want);
        prop_assert!(got <= 0.0);
    }
}
