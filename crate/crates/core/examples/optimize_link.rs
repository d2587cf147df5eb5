//! Multistart Nelder-Mead over the link parameters for a few unit pairs.

use entcirc::canon::{self, ghz, w};
use entcirc::ecp::{proposition_check, OptimizerConfig};
use entcirc::rng::stream;
use entcirc::Result;

fn main() -> Result<()> {
    let cfg = OptimizerConfig::default();
    let mut rng = stream(3, 0);
    let pairs = vec![
        ("GHZ, GHZ", ghz(), ghz()),
        ("GHZ, W", ghz(), w()),
        ("W, W", w(), w()),
        ("Haar, Haar", canon::haar_random(3, &mut rng)?, canon::haar_random(3, &mut rng)?),
    ];
    for (name, a, b) in pairs {
        let rec = proposition_check(&a, &b, 2, 3, &cfg, &mut rng)?;
        println!(
            "{name:<11} G1 {:.4} G2 {:.4}  best {:.6} at {}  restarts {}  bound {:.4}",
            rec.g1, rec.g2, rec.best_ggm, rec.report.best_params, rec.report.restarts_used, rec.report.upper_bound
        );
    }
    Ok(())
}
