//! GGM of the canonical states, with the witnessing cut.

use entcirc::canon::{dicke, ghz, w, wbar};
use entcirc::ggm::{ggm_full_with_cuts, ggm_restricted};
use entcirc::rng::stream;
use entcirc::{canon, Result, StateVector};

fn main() -> Result<()> {
    let states: Vec<(&str, StateVector)> = vec![
        ("GHZ", ghz()),
        ("W", w()),
        ("Wbar", wbar()),
        ("Dicke(4,2)", dicke(4, 2)?),
        ("Dicke(5,1)", dicke(5, 1)?),
    ];
    for (name, s) in &states {
        let r = ggm_full_with_cuts(s)?;
        println!("{name:<11} GGM = {:.6}  witness cut {:?}  cuts {}", r.value, r.witness_cut, r.per_cut.map_or(0, |c| c.len()));
    }

    let mut rng = stream(7, 0);
    let factors: Vec<StateVector> = (0..4).map(|_| canon::haar_random(1, &mut rng)).collect::<Result<_>>()?;
    let product = StateVector::tensor_all(&factors)?;
    println!("product    GGM = {:.2e}", ggm_full_with_cuts(&product)?.value);

    let haar = canon::haar_random(6, &mut rng)?;
    println!(
        "Haar(6)    full {:.6}  restricted(<=2) {:.6}",
        entcirc::ggm_full(&haar)?.value,
        ggm_restricted(&haar, 2)?.value
    );
    Ok(())
}
