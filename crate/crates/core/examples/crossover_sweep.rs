//! Sweeps aggregation levels over a truncated stable series, fits each
//! level, and locates the crossover to Gaussian behaviour.

use hfstable::crossover::{
    alpha_trajectory, detect_crossover, kurtosis_trajectory, level_label, CrossoverConfig,
};
use hfstable::returns::ReturnSeries;
use hfstable::stable::StableParams;
use hfstable::synthetic::truncated_stable_returns;
use hfstable::tlf::SigmaRule;

fn main() -> hfstable::Result<()> {
    let law = StableParams::new(1.4, 0.0, 1.0, 0.0)?;
    let xs = truncated_stable_returns(&law, 200_000, 10.0, SigmaRule::SelfConsistent, 21)?;
    // pretend the returns are 19.3 s apart
    let series = ReturnSeries::new(xs, Some(19.3))?;
    let levels = [1, 5, 10, 20, 50, 100, 200, 500, 1000];
    let traj = alpha_trajectory(&series, &levels, 0.05, "truncated alpha 1.4")?;
    let kurt = kurtosis_trajectory(&series, &levels)?;
    println!(
        "{:>6} {:>7} {:>8} {:>8} {:>7}",
        "level", "alpha", "beta", "KS p", "kurt"
    );
    for (p, k) in traj.points.iter().zip(&kurt) {
        println!(
            "{:>6} {:>7.4} {:>+8.4} {:>8.4} {:>7.3}",
            level_label(p.n_conv),
            p.params.alpha(),
            p.params.beta(),
            p.p_value,
            k.excess_kurtosis
        );
    }
    match detect_crossover(&traj, &kurt, &CrossoverConfig::default()) {
        Ok(r) => println!(
            "crossover at level {} ({:.0} s): {}",
            r.n_c,
            r.crossover_seconds.unwrap_or(f64::NAN),
            r.criterion_text
        ),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
