//! From a tick file to returns: read, drop repeated quotes, take log
//! returns, aggregate, and summarize.
//!
//! Pass a `timestamp,value` CSV as the first argument, or run without one
//! to use a generated stream.

use hfstable::io::{read_ticks_file, write_ticks, OnBadRow};
use hfstable::returns::{convolve_returns, dedup_ticks, log_returns};
use hfstable::stable::{sample, StableParams};
use hfstable::synthetic::{ticks_from_returns, TickConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ticks = match std::env::args().nth(1) {
        Some(path) => {
            let read = read_ticks_file(path.as_ref(), OnBadRow::Skip)?;
            for bad in &read.skipped {
                eprintln!("skipped line {}: {}", bad.line, bad.message);
            }
            read.data
        }
        None => {
            let law = StableParams::new(1.5, 0.0, 2e-4, 0.0)?;
            let r = sample(&law, 50_000, 8)?;
            let t = ticks_from_returns(&r, &TickConfig::default(), 8)?;
            let path = std::env::temp_dir().join("hfstable_ticks.csv");
            write_ticks(std::fs::File::create(&path)?, &t)?;
            println!("generated ticks written to {}", path.display());
            t
        }
    };
    let kept = dedup_ticks(&ticks)?;
    println!(
        "{} ticks, {} after dropping repeats ({:.1}% repeated)",
        ticks.len(),
        kept.len(),
        100.0 * (1.0 - kept.len() as f64 / ticks.len() as f64)
    );
    let returns = log_returns(&kept)?;
    for m in [1, 10, 100] {
        let agg = convolve_returns(&returns, m)?;
        let s = agg.stats()?;
        println!(
            "level {m:>4}: {:>6} returns, sd {:.3e}, excess kurtosis {:>8.2}, dt {:>8.1} s",
            s.count,
            s.variance.sqrt(),
            s.excess_kurtosis,
            s.mean_dt.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
