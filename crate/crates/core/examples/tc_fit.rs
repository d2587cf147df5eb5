//! t_c versus disorder strength and the exponential-decay fit.

use entcirc::canon::w;
use entcirc::disorder::{fit_tc, tc_sweep, Scheme, SweepConfig};
use entcirc::dynamics::{EvolutionLink, HamiltonianParams};
use entcirc::harness::TC_REFERENCE;
use entcirc::Result;

fn main() -> Result<()> {
    let sigmas = [0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1];
    let link = [EvolutionLink::new(2, 3, HamiltonianParams::xy(0.5))];
    let pts = tc_sweep(&[w(), w()], &link, 0.5, &sigmas, Scheme::default(), &SweepConfig::default(), "WxW")?;
    for p in &pts {
        println!("sigma {:.2}: t_c {:6.1}  g_s {:.5}", p.sigma, p.t_c, p.g_s);
    }
    let tcs: Vec<f64> = pts.iter().map(|p| p.t_c).collect();
    let fit = fit_tc(&sigmas, &tcs)?;
    println!("fit b {:.2} c {:.2} d {:.2}, relative residual {:.4}; reference {:?}", fit.b, fit.c, fit.d, fit.relative_residual, TC_REFERENCE);
    Ok(())
}
