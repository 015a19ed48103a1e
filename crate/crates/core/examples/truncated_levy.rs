//! Truncated Levy flights: the hard cutoff, its sampler, and the smoothly
//! truncated (exponentially damped) law.

use hfstable::stable::StableParams;
use hfstable::tlf::{
    hard_truncate, koponen_pdf, sample_hard_tlf, sigma_clip, HardTLFParams, KoponenParams,
};

fn main() -> hfstable::Result<()> {
    let base = StableParams::new(1.4, 0.0, 1.0, 0.0)?;

    let hard = HardTLFParams::new(base, 10.0)?;
    println!("hard cutoff at 10: normalization {:.6}", hard.norm_c());
    let grid = hard.pdf(&[0.0, 5.0, 9.99, 10.01])?;
    for (x, f) in grid.xs.iter().zip(&grid.pdf_values) {
        println!("  pdf({x}) = {f:.6e}");
    }
    let xs = sample_hard_tlf(&hard, 100_000, 1)?;
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    println!("  100000 draws, second moment {var:.3}");

    let raw = hfstable::stable::sample(&base, 100_000, 2)?;
    for n_std in [f64::INFINITY, 35.0, 10.0, 3.0] {
        let once = hard_truncate(&raw, n_std)?;
        let fixed = sigma_clip(&raw, n_std)?;
        println!(
            "  cut at {n_std} sample sd: one pass keeps {}, self-consistent keeps {}",
            once.len(),
            fixed.len()
        );
    }

    println!("smooth truncation, alpha 1.4");
    for lambda in [0.0, 0.01, 0.1, 1.0] {
        let law = KoponenParams::new(1.0, 1.4, lambda)?;
        let g = koponen_pdf(&law, &[0.0, 10.0, 100.0])?;
        println!(
            "  lambda {lambda:<5} variance {:>12.4}  pdf(0) {:.6}  pdf(10) {:.3e}  pdf(100) {:.3e}",
            law.variance(),
            g.pdf_values[0],
            g.pdf_values[1],
            g.pdf_values[2]
        );
    }
    Ok(())
}
