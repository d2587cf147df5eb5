//! Disorder-averaged GGM for W.W and its saturation, under three averaging rules.

use entcirc::canon::w;
use entcirc::disorder::{quench_avg_ggm, saturation, DisorderSpec, Scheme, SweepConfig};
use entcirc::dynamics::{EvolutionLink, HamiltonianParams};
use entcirc::Result;

fn main() -> Result<()> {
    let units = [w(), w()];
    let link = [EvolutionLink::new(2, 3, HamiltonianParams::xy(0.5))];
    let cfg = SweepConfig::default();
    let sigma = 0.1;
    let times = cfg.times_for(sigma)?;
    for scheme in [Scheme::default(), Scheme::GaussHermite { nodes: 64 }, Scheme::MonteCarlo { samples: 2000, seed: 1 }] {
        let spec = DisorderSpec::new(0.5, sigma, scheme)?;
        let series = quench_avg_ggm(&units, &link, &spec, &times, "WxW")?;
        let sat = saturation(&series, cfg.window, cfg.eps)?;
        println!("{scheme:?}: t_c {:.1}, g_s {:.5}", sat.t_c, sat.g_s);
    }
    Ok(())
}
