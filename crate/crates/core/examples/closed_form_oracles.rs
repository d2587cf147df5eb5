//! Closed-form spectra of merged two-qubit units against the numeric reduced states.

use entcirc::closedform::{eps12, single_party_eigs, SchmidtPair};
use entcirc::qstate::StateVector;
use entcirc::ecp::merge_pair;
use entcirc::{Result, UnitaryParams};

fn unit(gamma: f64) -> Result<StateVector> {
    StateVector::from_real(&[gamma.sqrt(), 0.0, 0.0, (1.0 - gamma).sqrt()])
}

fn main() -> Result<()> {
    let sp = SchmidtPair::new(0.8, 0.6)?;
    for p in [UnitaryParams::new(0.2, 0.5, 0.1)?, UnitaryParams::new(0.7, 0.3, 1.2)?] {
        let merged = merge_pair(&unit(0.8)?, &unit(0.6)?, 1, 2, p)?;
        let top = |q: usize| -> Result<f64> { Ok(merged.reduced_density(&[q])?.eigvals()?[0]) };
        let (e1, e2) = eps12(sp, p);
        println!(
            "{p}: eps1 {e1:.6} eps2 {e2:.6}; closed-form max {:.6}; numeric qubit 1 {:.6}, qubit 2 {:.6}",
            single_party_eigs(sp, p).max(),
            top(1)?,
            top(2)?
        );
    }
    Ok(())
}
