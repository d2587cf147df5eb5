//! Saturated-to-input GGM ratio along the generalized GHZ family.

use entcirc::disorder::{suppression_sweep, DisorderSpec, Family, Scheme, SweepConfig};
use entcirc::Result;

fn main() -> Result<()> {
    let family = Family::GGhz;
    let spec = DisorderSpec::new(0.5, family.default_sigma(), Scheme::default())?;
    let thetas: Vec<f64> = (1..=5).map(|k| std::f64::consts::FRAC_PI_2 * k as f64 / 6.0).collect();
    for p in suppression_sweep(family, &thetas, &spec, &SweepConfig::default())? {
        println!("theta {:.4}: input {:.5}  g_s {:.5}  ratio {:.4}  t_c {:.1}", p.theta, p.g_input, p.g_s, p.ratio, p.t_c);
    }
    Ok(())
}
