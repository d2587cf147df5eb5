//! Merge two GHZ units with a fixed U_d and compare with the closed form.

use std::f64::consts::FRAC_PI_4;

use entcirc::canon::{ghz, w};
use entcirc::closedform::{ghzghz_ggm, ghzghz_pauli_weights};
use entcirc::ecp::merge_pair;
use entcirc::{ggm_full, Result, UnitaryParams};

fn main() -> Result<()> {
    for p in [
        UnitaryParams::identity(),
        UnitaryParams::new(0.0, FRAC_PI_4, FRAC_PI_4)?,
        UnitaryParams::new(0.3, 0.5, 0.9)?,
        UnitaryParams::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4)?,
    ] {
        let merged = merge_pair(&ghz(), &ghz(), 2, 3, p)?;
        let weights = ghzghz_pauli_weights(p);
        println!(
            "{p}  GHZ.GHZ numeric {:.6}  closed form {:.6}  Pauli weights {:.3?}",
            ggm_full(&merged)?.value,
            ghzghz_ggm(p),
            weights
        );
    }
    let gw = merge_pair(&ghz(), &w(), 2, 3, UnitaryParams::new(0.0, FRAC_PI_4, FRAC_PI_4)?)?;
    println!("GHZ.W at (0, pi/4, pi/4): {:.6}", ggm_full(&gw)?.value);
    Ok(())
}
