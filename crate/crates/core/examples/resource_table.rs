//! Optimized merged GGM over random unit pairs, one row per split.

use entcirc::ecp::{resource_distribution, OptimizerConfig, Split};
use entcirc::harness::{TABLE1_REFERENCE_MEAN, TABLE1_REFERENCE_STD};
use entcirc::Result;

fn main() -> Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    println!("{:<14} {:>8} {:>8} {:>8} {:>8}", "split", "mean", "ref", "std", "ref");
    for (k, split) in Split::ALL.into_iter().enumerate() {
        let s = resource_distribution(split, samples, 11, &OptimizerConfig::default(), 25)?;
        println!(
            "{:<14} {:>8.4} {:>8.3} {:>8.4} {:>8.3}",
            split.label(),
            s.mean,
            TABLE1_REFERENCE_MEAN[k],
            s.std,
            TABLE1_REFERENCE_STD[k]
        );
    }
    Ok(())
}
