//! Autocorrelation of returns and of absolute returns, with the white-noise
//! band and the persistence time of positive correlation.

use hfstable::autocorr::{abs_acf, acf, persistence_lag, persistence_time};
use hfstable::returns::ReturnSeries;
use hfstable::synthetic::{ar1, volatility_clustered};

fn main() -> hfstable::Result<()> {
    let dt = 19.3;
    let cases = [
        ("AR(1), phi 0.6", ar1(50_000, 0.6, 3)?),
        (
            "volatility clustering",
            volatility_clustered(50_000, 0.995, 0.8, 3)?,
        ),
    ];
    for (name, xs) in cases {
        let series = ReturnSeries::new(xs, Some(dt))?;
        let r = acf(&series, 60)?;
        let a = abs_acf(&series, 60)?;
        println!("{name} (band {:.4})", r.band);
        for lag in [1, 2, 5, 10, 30, 60] {
            println!(
                "  lag {lag:>3}: returns {:+.4}  |returns| {:+.4}",
                r.coefficients[lag], a.coefficients[lag]
            );
        }
        println!(
            "  returns stay correlated for {} lags ({:.1} s); |returns| for {} lags; {:.0}% of return lags inside the band",
            persistence_lag(&r),
            persistence_time(&r, dt)?,
            persistence_lag(&a),
            100.0 * r.fraction_inside()
        );
    }
    Ok(())
}
