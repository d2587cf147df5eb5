//! Linear chains of 3-qubit units: the two-branch recursion against direct merging.

use entcirc::canon::{self, ghz};
use entcirc::ecp::{chain_sequential, chain_state};
use entcirc::rng::stream;
use entcirc::{ggm_full, Result, UnitaryParams};

fn main() -> Result<()> {
    let p = UnitaryParams::new(0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)?;
    for m in 2..=4 {
        let params = vec![p; m - 1];
        let s = chain_state(&ghz(), m, &params)?;
        let f = s.fidelity(&chain_sequential(&ghz(), m, &params)?)?;
        println!("GHZ chain m={m}: {} qubits, fidelity {f:.15}, GGM {:.6}", s.num_qubits(), ggm_full(&s)?.value);
    }
    let mut rng = stream(5, 0);
    let unit = canon::haar_random(3, &mut rng)?;
    let params: Vec<UnitaryParams> = (0..4).map(|k| UnitaryParams::clamped([0.1 * k as f64, 0.4, 0.7])).collect();
    let s = chain_state(&unit, 5, &params)?;
    println!("Haar chain m=5: fidelity {:.15}", s.fidelity(&chain_sequential(&unit, 5, &params)?)?);
    Ok(())
}
