//! Density, distribution function and quantiles of a few stable laws,
//! with the power-law tail next to the numerical density.

use hfstable::stable::{tail_density, StableDensity, StableParams};

fn main() -> hfstable::Result<()> {
    let laws = [
        ("Gaussian (alpha 2)", StableParams::new(2.0, 0.0, 1.0, 0.0)?),
        ("Cauchy", StableParams::new(1.0, 0.0, 1.0, 0.0)?),
        ("alpha 1.4", StableParams::new(1.4, 0.0, 1.0, 0.0)?),
        (
            "alpha 1.4, beta 0.5",
            StableParams::new(1.4, 0.5, 1.0, 0.0)?,
        ),
        (
            "Levy (alpha 0.5, beta 1)",
            StableParams::new(0.5, 1.0, 1.0, 0.0)?,
        ),
    ];
    for (name, params) in laws {
        let law = StableDensity::new(params)?;
        println!("{name}");
        println!("  {:>8} {:>14} {:>14}", "x", "pdf", "cdf");
        for x in [-5.0, -1.0, 0.0, 0.5, 1.0, 5.0] {
            println!("  {x:>8} {:>14.6e} {:>14.8}", law.pdf(x), law.cdf(x));
        }
        let q: Vec<String> = [0.05, 0.25, 0.5, 0.75, 0.95]
            .iter()
            .map(|&p| format!("{:.4}", law.quantile(p).unwrap() + 0.0))
            .collect();
        println!("  quantiles 5/25/50/75/95%: {}", q.join(" "));
        if params.alpha() < 2.0 {
            let x = 200.0;
            println!(
                "  at x = {x}: pdf {:.6e}, tail law {:.6e}",
                law.pdf(x),
                tail_density(&params, x)?
            );
        }
    }
    Ok(())
}
