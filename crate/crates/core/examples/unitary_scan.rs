//! Share of the link parameter cube that reaches min(G1, G2).

use entcirc::canon::{ghz, w};
use entcirc::ecp::{scan_unitary_space, S_U_TOL};
use entcirc::Result;

fn main() -> Result<()> {
    let points = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    for (name, b) in [("GHZ-GHZ", ghz()), ("GHZ-W", w())] {
        let scan = scan_unitary_space(&ghz(), &b, 2, 3, points, S_U_TOL)?;
        println!("{name:<8} {points}^3 grid: target {:.4}, S_U fraction {:.4}", scan.target, scan.s_u_fraction);
    }
    Ok(())
}
