//! Ingestion, de-duplication, log returns, aggregation and autocorrelation.

use std::io::Cursor;
use std::path::PathBuf;

use hfstable::autocorr::{abs_acf, acf, acf_of, persistence_lag, persistence_time, WHITE_NOISE_Z};
use hfstable::io::{
    read_daily_file, read_returns, read_returns_file, read_ticks, read_ticks_file, write_returns,
    write_ticks, OnBadRow,
};
use hfstable::returns::{
    convolve_returns, dedup_ticks, excess_kurtosis, log_returns, ReturnSeries,
};
use hfstable::seed::derive;
use hfstable::synthetic::{moving_sum, ticks_from_returns, volatility_clustered, TickConfig};
use hfstable::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const MASTER: u64 = 4_242;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn gaussian(n: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

#[test]
fn bundled_tick_file() {
    let ticks = read_ticks_file(&data("ticks.csv"), OnBadRow::Fail)
        .unwrap()
        .data;
    assert_eq!(ticks.len(), 2000);
    let ts = ticks.timestamps().unwrap();
    assert!(ts.windows(2).all(|w| w[1] >= w[0]));
    let unique = dedup_ticks(&ticks).unwrap();
    let kept = unique.len() as f64 / ticks.len() as f64;
    // the file repeats the previous quote about 73% of the time
    assert!((kept - 0.27).abs() < 0.03, "{kept}");
    assert!(unique.values().windows(2).all(|w| w[0] != w[1]));
    let r = log_returns(&unique).unwrap();
    assert_eq!(r.len(), unique.len() - 1);
    assert!(r.mean_dt().unwrap() > 0.0);
}

#[test]
fn bundled_daily_and_return_files() {
    let daily = read_daily_file(&data("daily.csv"), OnBadRow::Fail)
        .unwrap()
        .data;
    assert_eq!(daily.len(), 300);
    let r = log_returns(&dedup_ticks(&daily).unwrap()).unwrap();
    // weekdays only: consecutive closes are one to three days apart
    let dt = r.mean_dt().unwrap();
    assert!(dt > 86_400.0 && dt < 3.0 * 86_400.0, "{dt}");
    let returns = read_returns_file(&data("returns.csv"), OnBadRow::Fail, None)
        .unwrap()
        .data;
    assert_eq!(returns.len(), 1000);
    assert_eq!(returns.n_conv(), 1);
    assert_eq!(returns.mean_dt(), None);
}

#[test]
fn telescoping_log_returns() {
    let values = vec![100.0, 101.0, 99.5, 99.5, 103.25, 102.0];
    let ticks = hfstable::returns::TickSeries::new(values.clone(), None).unwrap();
    let unique = dedup_ticks(&ticks).unwrap();
    assert_eq!(unique.values(), &[100.0, 101.0, 99.5, 103.25, 102.0]);
    assert_eq!(dedup_ticks(&unique).unwrap(), unique);
    let r = log_returns(&unique).unwrap();
    // prices rebuilt from the first value and the returns
    let mut level = 100f64.ln();
    for (k, step) in r.returns().iter().enumerate() {
        level += step;
        assert!((level.exp() / unique.values()[k + 1] - 1.0).abs() < 1e-14);
    }
}

#[test]
fn synthetic_stream_spacing() {
    // four years of 252 trading days at one fluctuation per 19.3 s
    let n = (4.0 * 252.0 * 23_400.0 / 19.3) as usize;
    let steps = gaussian(n, 1e-4, derive(MASTER, "spacing", 0));
    let ticks =
        ticks_from_returns(&steps, &TickConfig::default(), derive(MASTER, "spacing", 1)).unwrap();
    let unique = dedup_ticks(&ticks).unwrap();
    let dt = log_returns(&unique).unwrap().mean_dt().unwrap();
    assert!((dt / 19.3 - 1.0).abs() < 0.01, "{dt}");
    let kept = unique.len() as f64 / ticks.len() as f64;
    assert!((kept - 0.27).abs() < 0.005, "{kept}");
}

#[test]
fn kurtosis_falls_as_one_over_the_level() {
    // Laplace increments: excess kurtosis 3, so k(m) = 3 / m
    let mut rng = ChaCha8Rng::seed_from_u64(derive(MASTER, "laplace", 0));
    let reps = 20;
    let mut k = [0.0; 3];
    for _ in 0..reps {
        let x: Vec<f64> = (0..200_000)
            .map(|_| {
                let e: f64 = -(1.0 - rng.random::<f64>()).ln();
                if rng.random::<bool>() {
                    e
                } else {
                    -e
                }
            })
            .collect();
        let s = ReturnSeries::new(x, None).unwrap();
        for (slot, m) in [1, 5, 10].into_iter().enumerate() {
            k[slot] +=
                excess_kurtosis(convolve_returns(&s, m).unwrap().returns()).unwrap() / reps as f64;
        }
    }
    assert!((k[0] - 3.0).abs() < 0.1, "{k:?}");
    assert!((k[1] - 0.6).abs() < 0.06, "{k:?}");
    assert!((k[2] - 0.3).abs() < 0.05, "{k:?}");
}

#[test]
fn nested_aggregation_multiplies_levels() {
    let s = ReturnSeries::new(gaussian(1000, 1.0, 1), Some(19.3)).unwrap();
    let a = convolve_returns(&convolve_returns(&s, 2).unwrap(), 5).unwrap();
    let b = convolve_returns(&s, 10).unwrap();
    assert_eq!(a.n_conv(), 10);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.returns().iter().zip(b.returns()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(matches!(
        convolve_returns(&s, 1001),
        Err(Error::EmptyResult(_))
    ));
}

#[test]
fn bad_rows_report_their_line() {
    let text = "timestamp,value\n0,100\n1,101\n2,oops\n3,102\n";
    match read_ticks(Cursor::new(text), OnBadRow::Fail) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let ok = read_ticks(Cursor::new(text), OnBadRow::Skip).unwrap();
    assert_eq!(ok.data.len(), 3);
    assert_eq!(ok.skipped.len(), 1);
    assert_eq!(ok.skipped[0].line, 4);
    let negative = "timestamp,value\n0,100\n1,-3\n";
    assert!(matches!(
        read_ticks(Cursor::new(negative), OnBadRow::Fail),
        Err(Error::Parse { line: 3, .. })
    ));
    let header = "time,value\n0,100\n";
    assert!(matches!(
        read_ticks(Cursor::new(header), OnBadRow::Fail),
        Err(Error::Parse { line: 1, .. })
    ));
}

#[test]
fn write_then_read_is_lossless() {
    let r = gaussian(500, 3e-4, 9);
    let mut buf = Vec::new();
    write_returns(&mut buf, &r).unwrap();
    let back = read_returns(Cursor::new(&buf), OnBadRow::Fail, None)
        .unwrap()
        .data;
    assert_eq!(back.returns(), &r[..]);

    let steps = gaussian(300, 1e-3, 10);
    let ticks = ticks_from_returns(&steps, &TickConfig::default(), 3).unwrap();
    let mut buf = Vec::new();
    write_ticks(&mut buf, &ticks).unwrap();
    let back = read_ticks(Cursor::new(&buf), OnBadRow::Fail).unwrap().data;
    assert_eq!(back.values(), ticks.values());
    let (a, b) = (back.timestamps().unwrap(), ticks.timestamps().unwrap());
    assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 5e-4));
}

#[test]
fn persistence_of_a_moving_sum() {
    // correlation 1 - d/152 drops into the band about 150 lags out
    let x = moving_sum(1_000_000, 152, derive(MASTER, "window", 0)).unwrap();
    let r = acf_of(&x, 200, WHITE_NOISE_Z).unwrap();
    let lag = persistence_lag(&r);
    assert!((142..=156).contains(&lag), "{lag}");
    let minutes = persistence_time(&r, 19.3).unwrap() / 60.0;
    assert!((minutes - 48.25).abs() < 3.0, "{minutes}");
}

#[test]
fn clustered_volatility_shows_only_in_magnitudes() {
    let x = volatility_clustered(200_000, 0.99, 0.8, derive(MASTER, "garch-like", 0)).unwrap();
    let s = ReturnSeries::new(x, Some(19.3)).unwrap();
    let plain = acf(&s, 100).unwrap();
    let magnitude = abs_acf(&s, 100).unwrap();
    // the plain coefficients are noise (wider than the i.i.d. band, since
    // the series is dependent), the magnitudes stay clearly positive
    let largest_plain = plain.coefficients[1..]
        .iter()
        .fold(0f64, |m, c| m.max(c.abs()));
    let smallest_magnitude = magnitude.coefficients[1..]
        .iter()
        .fold(1f64, |m, &c| m.min(c));
    assert!(
        largest_plain < smallest_magnitude,
        "{largest_plain} vs {smallest_magnitude}"
    );
    assert!(persistence_lag(&plain) < 3);
    assert!(
        persistence_lag(&magnitude) == 100,
        "{}",
        persistence_lag(&magnitude)
    );
}

#[test]
fn white_noise_stays_in_the_band() {
    let s = ReturnSeries::new(gaussian(1_000_000, 1.0, derive(MASTER, "white", 0)), None).unwrap();
    let r = acf(&s, 200).unwrap();
    assert!(r.fraction_inside() >= 0.94, "{}", r.fraction_inside());
    assert!((r.band - WHITE_NOISE_Z / 1000.0).abs() < 1e-15);
}
