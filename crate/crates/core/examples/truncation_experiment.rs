//! The same simulated stable data truncated at several cutoffs: how fast
//! the fitted alpha climbs to 2 under aggregation depends on the cutoff.
//!
//! Optional arguments: length (default 100000) and seed.

use hfstable::crossover::{level_label, truncation_batch};
use hfstable::stable::StableParams;

fn main() -> hfstable::Result<()> {
    let mut args = std::env::args().skip(1);
    let length: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let law = StableParams::new(1.4, 0.0, 1.0, 0.0)?;
    let levels = [1, 10, 20, 50, 100, 200, 500, 1000];
    let cells = truncation_batch(
        &law,
        &[length],
        &[f64::INFINITY, 35.0, 10.0, 3.0],
        &levels,
        seed,
    )?;
    for cell in cells {
        println!("cutoff {} sd, {:?} values kept", cell.n_std, cell.kept);
        match cell.trajectory {
            Ok(t) => {
                for p in &t.points {
                    println!(
                        "  {:>6} alpha {:.4}  KS p {:.4}{}",
                        level_label(p.n_conv),
                        p.params.alpha(),
                        p.p_value,
                        if p.reject_at_5pct { "  rejected" } else { "" }
                    );
                }
            }
            Err(e) => println!("  failed: {e}"),
        }
    }
    Ok(())
}
