//! Growing a W state onto auxiliary |0> qubits with XY links.

use entcirc::dynamics::{dicke_closed_form, dicke_growth, z_norm_sqr, HamiltonianParams};
use entcirc::{ggm_full, Result};

fn main() -> Result<()> {
    let j = 1.0;
    for n_aux in 1..=5 {
        let t = 1.2;
        let s = dicke_growth(n_aux, HamiltonianParams::xy(j), t)?;
        let f = s.fidelity(&dicke_closed_form(n_aux, j, t)?)?;
        println!(
            "n_aux={n_aux}: fidelity vs closed form {f:.15}, GGM {:.6}, <Z|Z>/2^(2N-1) = {:.15}",
            ggm_full(&s)?.value,
            z_norm_sqr(n_aux, j, t)? / 2f64.powi(2 * n_aux as i32 - 1)
        );
    }
    Ok(())
}
