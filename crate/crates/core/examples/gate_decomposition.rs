//! Three-CNOT circuit for U_d, written out and read back.

use entcirc::unitary::{decompose_u_d, phase_fidelity, reconstruct, u_d, GateSequence};
use entcirc::{Result, UnitaryParams};

fn main() -> Result<()> {
    let p: UnitaryParams = std::env::args().nth(1).unwrap_or_else(|| "0.4,0.6,0.2".into()).parse()?;
    let seq = decompose_u_d(p);
    let text = seq.to_text();
    print!("{text}");
    let back = GateSequence::from_text(&text)?;
    println!(
        "CNOTs {}, rotations {}, fidelity {:.15}, round trip {}",
        seq.cnot_count(),
        seq.rotation_count(),
        phase_fidelity(&u_d(p), &reconstruct(&back)?),
        back == seq
    );
    Ok(())
}
