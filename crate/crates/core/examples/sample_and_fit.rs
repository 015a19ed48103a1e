//! Draws stable samples, recovers the parameters by maximum likelihood and
//! checks the fit with Kolmogorov-Smirnov.

use hfstable::estimation::{bootstrap_pvalue, fit_and_test};
use hfstable::stable::{sample, StableParams};

fn main() -> hfstable::Result<()> {
    let n = 20_000;
    for (alpha, beta) in [(1.2, 0.0), (1.5, 0.5), (1.8, -0.3), (2.0, 0.0)] {
        let truth = StableParams::new(alpha, beta, 1.0, 0.0)?;
        let xs = sample(&truth, n, 11)?;
        let fit = fit_and_test(&xs, 1, 0.05)?;
        let p = fit.params;
        println!(
            "truth ({alpha}, {beta:+}) -> alpha {:.4} beta {:+.4} gamma {:.4} delta {:+.4}  KS {:.5} p {:.3}",
            p.alpha(),
            p.beta(),
            p.gamma(),
            p.delta(),
            fit.ks_statistic,
            fit.p_value
        );
    }

    // the asymptotic p-value ignores that parameters were fitted; a
    // parametric bootstrap accounts for it
    let truth = StableParams::new(1.5, 0.0, 1.0, 0.0)?;
    let xs = sample(&truth, 500, 5)?;
    let fit = fit_and_test(&xs, 1, 0.05)?;
    let mc = bootstrap_pvalue(fit.ks_statistic, xs.len(), &fit.params, 20, 99)?;
    println!(
        "n = 500: asymptotic p {:.3}, bootstrap p {:.3} (20 replicates)",
        fit.p_value, mc
    );
    Ok(())
}
