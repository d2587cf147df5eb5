//! GGM under an XYZ link between two units; plateaus, GGM period and state revival.

use std::f64::consts::PI;

use entcirc::canon::{ghz, w};
use entcirc::dynamics::{detect_plateaus, ggm_period, ggm_timeseries, time_grid, Evolution, EvolutionLink, HamiltonianParams, PLATEAU_TOL};
use entcirc::Result;

fn main() -> Result<()> {
    for j in [0.5, 1.0, 2.0] {
        let link = [EvolutionLink::new(2, 3, HamiltonianParams::xy(j))];
        let units = [ghz(), ghz()];
        let t_max = 4.0 * PI / j;
        let series = ggm_timeseries(&units, &link, &time_grid(t_max, 0.01 / j)?, "GHZxGHZ")?;
        let plateaus = detect_plateaus(&series, PLATEAU_TOL, 5);
        let evo = Evolution::from_units(&units, &link)?;
        let probes: Vec<f64> = (0..8).map(|k| 0.2 / j + 0.7 * k as f64 / j).collect();
        let period = ggm_period(&evo, &probes, 1.5 * 2.0 * PI / j, 0.05 / j, 1e-9)?;
        println!(
            "J={j}: max GGM {:.4}, {} plateaus (first at t={:.3}), GGM period {:.6}, revival {:?}",
            series.max_value(),
            plateaus.len(),
            plateaus.first().map_or(f64::NAN, |p| p.t_start),
            period.unwrap_or(f64::NAN),
            evo.revival_period(t_max + 0.1, 0.05 / j)?
        );
    }

    let hp = HamiltonianParams::new(1.0, 0.4, 0.7)?;
    let series = ggm_timeseries(&[w(), w()], &[EvolutionLink::new(2, 3, hp)], &time_grid(20.0, 0.05)?, "WxW")?;
    println!("WxW, gamma=0.4, delta=0.7: max GGM {:.6}", series.max_value());
    Ok(())
}
