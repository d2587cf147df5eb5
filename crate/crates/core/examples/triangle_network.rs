//! Three GHZ units joined cyclically: optimized GGM, the xi expansion, and growth costs.

use entcirc::canon::ghz;
use entcirc::ecp::{optimize_links, triangle_plan, triangle_step, triangle_xi_components, OptimizerConfig, TRIANGLE_LINKS};
use entcirc::rng::stream;
use entcirc::{ggm_full, Result, StateVector, UnitaryParams};

fn main() -> Result<()> {
    let units = [ghz(), ghz(), ghz()];
    let base = StateVector::tensor_all(&units)?;
    let mut rng = stream(9, 0);
    let rep = optimize_links(&base, &TRIANGLE_LINKS, &OptimizerConfig::default(), &mut rng)?;
    println!("optimized GGM {:.8} (bound {:.4}) after {} restarts", rep.best_ggm, rep.upper_bound, rep.restarts_used);

    let params: [UnitaryParams; 3] = std::array::from_fn(|k| rep.best_params[k]);
    let state = triangle_step(&units, params)?;
    println!("rebuilt state GGM {:.8}", ggm_full(&state)?.value);
    for (p, comp) in triangle_xi_components(&state, params)?.iter().enumerate() {
        let (k, amp) = comp.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        println!("  untouched {p:03b}: xi pattern {k:06b}, amplitude {:.6}", amp.re);
    }
    for step in 1..=4 {
        let plan = triangle_plan(step)?;
        println!("step {step}: {} qubits, {} distinct unitaries, {} applications", plan.qubits, plan.distinct_unitaries, plan.applications);
    }
    Ok(())
}
