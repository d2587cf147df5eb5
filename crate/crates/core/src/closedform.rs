//! Closed-form eigenvalues for merged unit pairs, used as oracles.
//!
//! Layouts these formulas refer to:
//! - two-qubit units: unit 1 on qubits (0, 1), unit 2 on (2, 3), `u_d` on (1, 2);
//! - three-qubit units: GHZ on (0, 1, 2), second unit on (3, 4, 5), `u_d` on (2, 3).
//!
//! Several of these expressions are one branch of a reduced spectrum rather
//! than its maximum. Those are kept as written and documented per function;
//! [`ghzghz_ggm`] gives the exact value for the GHZ pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::unitary::UnitaryParams;

const SUM_TOL: f64 = 1e-12;
const RADICAND_TOL: f64 = 1e-12;

/// Squared Schmidt coefficients of two two-qubit units,
/// `√γ|x0> + √δ|y1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchmidtPair {
    pub gamma1: f64,
    pub delta1: f64,
    pub gamma2: f64,
    pub delta2: f64,
}

impl SchmidtPair {
    /// Build from the leading weights; requires `γ1 ≥ γ2 ≥ 1/2`.
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        Self::from_components(gamma1, 1.0 - gamma1, gamma2, 1.0 - gamma2)
    }

    pub fn from_components(gamma1: f64, delta1: f64, gamma2: f64, delta2: f64) -> Result<Self> {
        for (name, v) in [("gamma1", gamma1), ("delta1", delta1), ("gamma2", gamma2), ("delta2", delta2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if (gamma1 + delta1 - 1.0).abs() > SUM_TOL || (gamma2 + delta2 - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidArgument("Schmidt weights must sum to 1".into()));
        }
        if gamma1 < delta1 || gamma1 < gamma2 || gamma2 < delta2 {
            return Err(Error::InvalidArgument(
                "Schmidt ordering requires gamma1 >= delta1, gamma1 >= gamma2 >= delta2".into(),
            ));
        }
        Ok(Self { gamma1, delta1, gamma2, delta2 })
    }
}

/// Populations of the two linked qubits after the merge: `<0|ρ_1|0>`, `<1|ρ_2|1>`.
pub fn eps12(sp: SchmidtPair, p: UnitaryParams) -> (f64, f64) {
    let (g1, g2) = (sp.gamma1, sp.gamma2);
    let cm = (2.0 * (p.alpha_x - p.alpha_y)).cos();
    let cp = (2.0 * (p.alpha_x + p.alpha_y)).cos();
    let e1 = 0.5 * (1.0 + (g1 + g2 - 1.0) * cm + (g1 - g2) * cp);
    let e2 = 0.5 * (1.0 - (g1 + g2 - 1.0) * cm + (g1 - g2) * cp);
    (e1, e2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleQubitEigs {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
}

impl SingleQubitEigs {
    pub fn max(&self) -> f64 {
        self.lambda1.max(self.lambda2).max(self.lambda3).max(self.lambda4)
    }
}

/// Largest eigenvalue of each single-qubit marginal of the merged 4-qubit state.
pub fn single_party_eigs(sp: SchmidtPair, p: UnitaryParams) -> SingleQubitEigs {
    let (e1, e2) = eps12(sp, p);
    SingleQubitEigs {
        lambda1: sp.gamma1.max(sp.delta1),
        lambda2: e1.max(1.0 - e1),
        lambda3: e2.max(1.0 - e2),
        lambda4: sp.gamma2.max(sp.delta2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoQubitEigs {
    pub lambda1_1: f64,
    pub lambda2_12: f64,
    pub lambda2_13: f64,
}

/// `λ₁¹` and the two-party expressions for cuts {0,1} and {0,2}.
///
/// `lambda2_12` and `lambda2_13` are always eigenvalues of the corresponding
/// two-qubit marginals, but not necessarily the largest one.
pub fn two_party_eigs(sp: SchmidtPair, p: UnitaryParams) -> TwoQubitEigs {
    let (g1, g2) = (sp.gamma1, sp.gamma2);
    let (ax, ay, az) = (p.alpha_x, p.alpha_y, p.alpha_z);
    let prod = g1 * g2 * (1.0 - g1) * (1.0 - g2) * (4.0 * az).cos();
    let f = (2.0 * g1 * g2 - g1 - g2) * (1.0 + 2.0 * g1 * g2 - g1 - g2) + 4.0 * prod;
    let g = (g1 + g2 - 2.0 * g1 * g2) * (1.0 + 2.0 * g1 * g2 - g1 - g2) + 4.0 * prod;
    let (cm, cp, sp_) = ((ax - ay).cos(), (ax + ay).cos(), (ax + ay).sin());
    let big_f = (g1 + g2 - 1.0).powi(2) * cm.powi(4) - 2.0 * cm * cm * sp_ * sp_ * f
        + (g1 - g2).powi(2) * sp_.powi(4);
    let big_g = (g1 + g2 - 1.0).powi(2) * cm.powi(4)
        + 2.0 * cm * cm * cp * cp * g
        + (g1 - g2).powi(2) * cp.powi(4);
    let w = (2.0 * g1 - 1.0) * (2.0 * g2 - 1.0);
    let (c2x, c2y, s2x, s2y) = ((2.0 * ax).cos(), (2.0 * ay).cos(), (2.0 * ax).sin(), (2.0 * ay).sin());
    let l13 = 0.25 * (1.0 + w * c2x * c2y + s2x * s2y + 2.0 * clamped_sqrt(big_f));
    let l12 = 0.25 * (1.0 + w * s2x * s2y + c2x * c2y + 2.0 * clamped_sqrt(big_g));
    TwoQubitEigs { lambda1_1: g1.max(sp.delta1), lambda2_12: l12, lambda2_13: l13 }
}

fn clamped_sqrt(x: f64) -> f64 {
    if x < 0.0 && x > -RADICAND_TOL {
        0.0
    } else {
        x.max(0.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThreeQubitEigs {
    pub lambda1: f64,
    pub lambda3_123: f64,
    pub lambda3_124: f64,
}

/// GHZ⊗GHZ merged on (2, 3): `λ₁ = 1/2` for every untouched qubit, and the
/// three-party expressions for cuts {0,1,2} and {0,1,3}.
///
/// `lambda3_123` is the weight of the identity term in the operator-Schmidt
/// expansion of `u_d`; the maximum of that cut is [`ghzghz_pauli_weights`]'s
/// largest entry. `lambda3_124` is the maximum of its cut.
pub fn ghzghz_eigs(p: UnitaryParams) -> ThreeQubitEigs {
    let (cx, cy, cz) = cos2(p);
    let (sx, sy, sz) = sin2(p);
    ThreeQubitEigs {
        lambda1: 0.5,
        lambda3_123: 0.25 * (1.0 + cy * cz + cx * (cy + cz)),
        lambda3_124: 0.25 * (1.0 + sy * sz + sx * (sy + sz)),
    }
}

/// Squared operator-Schmidt weights `|c_k|²` of `u_d = Σ c_k σ_k⊗σ_k` for
/// `k = I, X, Y, Z`; the spectrum of cut {0,1,2} of the GHZ pair.
pub fn ghzghz_pauli_weights(p: UnitaryParams) -> [f64; 4] {
    let (cx, cy, cz) = cos2(p);
    [
        0.25 * (1.0 + cx * cy + cx * cz + cy * cz),
        0.25 * (1.0 - cx * cy - cx * cz + cy * cz),
        0.25 * (1.0 - cx * cy + cx * cz - cy * cz),
        0.25 * (1.0 + cx * cy - cx * cz - cy * cz),
    ]
}

/// Exact GGM of GHZ⊗GHZ merged by `u_d(p)` on (2, 3).
pub fn ghzghz_ggm(p: UnitaryParams) -> f64 {
    let top = ghzghz_pauli_weights(p).into_iter().fold(0.5, f64::max);
    1.0 - top.max(ghzghz_eigs(p).lambda3_124)
}

/// GHZ⊗W merged on (2, 3): `λ₁⁵ = λ₁⁶ = 2/3` and the cut {0,1,2}, {0,1,3}
/// expressions with radicands `A`, `B`.
///
/// `lambda3_124` is the maximum of its cut; `lambda3_123` is an eigenvalue of
/// its cut that is not always the largest.
pub fn ghzw_eigs(p: UnitaryParams) -> ThreeQubitEigs {
    let (ax, ay, az) = (p.alpha_x, p.alpha_y, p.alpha_z);
    let c = f64::cos;
    let s = f64::sin;
    let common = 42.0 + c(4.0 * (ax - ay)) + c(4.0 * (ax + ay));
    let a = common
        + 40.0 * (c(2.0 * (ax - ay)) + c(2.0 * (ax + ay)))
        + 18.0 * (c(4.0 * ax) + c(4.0 * ay))
        + 32.0 * (c(2.0 * ax) + c(2.0 * ay)).powi(2) * c(4.0 * az);
    let b = common + 40.0 * (c(2.0 * (ax - ay)) - c(2.0 * (ax + ay)))
        - 18.0 * (c(4.0 * ax) + c(4.0 * ay))
        - 32.0 * (s(2.0 * ax) + s(2.0 * ay)).powi(2) * c(4.0 * az);
    ThreeQubitEigs {
        lambda1: 2.0 / 3.0,
        lambda3_123: (12.0 + 12.0 * c(2.0 * ax) * c(2.0 * ay) + clamped_sqrt(2.0 * a)) / 48.0,
        lambda3_124: (12.0 + 12.0 * s(2.0 * ax) * s(2.0 * ay) + clamped_sqrt(2.0 * b)) / 48.0,
    }
}

fn cos2(p: UnitaryParams) -> (f64, f64, f64) {
    ((2.0 * p.alpha_x).cos(), (2.0 * p.alpha_y).cos(), (2.0 * p.alpha_z).cos())
}

fn sin2(p: UnitaryParams) -> (f64, f64, f64) {
    ((2.0 * p.alpha_x).sin(), (2.0 * p.alpha_y).sin(), (2.0 * p.alpha_z).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{ghz, w};
    use crate::qstate::StateVector;
    use crate::rng::stream;
    use crate::unitary::u_d;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn spectrum(s: &StateVector, keep: &[usize]) -> Vec<f64> {
        s.reduced_density(keep).unwrap().eigvals().unwrap()
    }

    fn is_eigenvalue(x: f64, spec: &[f64]) -> bool {
        spec.iter().any(|e| (e - x).abs() < 1e-9)
    }

    fn unit(gamma: f64) -> StateVector {
        StateVector::from_real(&[gamma.sqrt(), 0.0, 0.0, (1.0 - gamma).sqrt()]).unwrap()
    }

    fn two_pair(sp: SchmidtPair, p: UnitaryParams) -> StateVector {
        unit(sp.gamma1).tensor(&unit(sp.gamma2)).unwrap().apply_two_qubit(&u_d(p), 1, 2).unwrap()
    }

    fn random_pair(rng: &mut impl Rng) -> (SchmidtPair, UnitaryParams) {
        let g1 = rng.random_range(0.5..1.0);
        let g2 = rng.random_range(0.5..=g1);
        let p = UnitaryParams::clamped(std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2)));
        (SchmidtPair::new(g1, g2).unwrap(), p)
    }

    fn params(x: f64, y: f64, z: f64) -> UnitaryParams {
        UnitaryParams::new(x, y, z).unwrap()
    }

    #[test]
    fn schmidt_pair_validation() {
        assert!(SchmidtPair::new(0.7, 0.6).is_ok());
        assert!(SchmidtPair::new(0.6, 0.7).is_err());
        assert!(SchmidtPair::new(0.4, 0.4).is_err());
        assert!(SchmidtPair::from_components(0.7, 0.2, 0.6, 0.4).is_err());
    }

    #[test]
    fn eps_stationary_values() {
        let sp = SchmidtPair::new(0.8, 0.65).unwrap();
        assert!((eps12(sp, params(0.0, 0.0, 0.3)).0 - 0.8).abs() < 1e-15);
        assert!((eps12(sp, params(FRAC_PI_4, FRAC_PI_4, 0.3)).0 - 0.65).abs() < 1e-15);
        assert!((eps12(sp, params(FRAC_PI_2, 0.0, 0.3)).0 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn eps_sum_identity() {
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let (sp, p) = random_pair(&mut rng);
            let (e1, e2) = eps12(sp, p);
            let rhs = 1.0 + (sp.gamma1 - sp.gamma2) * (2.0 * (p.alpha_x + p.alpha_y)).cos();
            assert!((e1 + e2 - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn eps_matches_marginals() {
        let mut rng = stream(4, 0);
        for _ in 0..100 {
            let (sp, p) = random_pair(&mut rng);
            let s = two_pair(sp, p);
            let (e1, e2) = eps12(sp, p);
            let r1 = s.reduced_density(&[1]).unwrap();
            let r2 = s.reduced_density(&[2]).unwrap();
            assert!((r1.entries[(0, 0)].re - e1).abs() < 1e-12);
            assert!((r2.entries[(1, 1)].re - e2).abs() < 1e-12);
            let eigs = single_party_eigs(sp, p);
            for (q, l) in [eigs.lambda1, eigs.lambda2, eigs.lambda3, eigs.lambda4].into_iter().enumerate() {
                assert!((spectrum(&s, &[q])[0] - l).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_party_grid_maximum_is_gamma1() {
        let sp = SchmidtPair::new(0.75, 0.6).unwrap();
        let mut best = 0.0f64;
        for i in 0..33 {
            for j in 0..33 {
                let p = params(i as f64 * FRAC_PI_2 / 32.0, j as f64 * FRAC_PI_2 / 32.0, 0.2);
                best = best.max(single_party_eigs(sp, p).max());
                assert!(single_party_eigs(sp, p).max() >= 0.75 - 1e-15);
            }
        }
        assert!((best - 0.75).abs() < 1e-15);
        let half = SchmidtPair::new(0.5, 0.5).unwrap();
        let e = single_party_eigs(half, params(0.3, 1.1, 0.7));
        for l in [e.lambda1, e.lambda2, e.lambda3, e.lambda4] {
            assert!((l - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn two_party_values_are_marginal_eigenvalues() {
        let mut rng = stream(5, 0);
        for _ in 0..100 {
            let (sp, p) = random_pair(&mut rng);
            let s = two_pair(sp, p);
            let e = two_party_eigs(sp, p);
            assert!((e.lambda1_1 - spectrum(&s, &[0])[0]).abs() < 1e-9);
            assert!(is_eigenvalue(e.lambda2_12, &spectrum(&s, &[0, 1])));
            assert!(is_eigenvalue(e.lambda2_13, &spectrum(&s, &[0, 2])));
            for l in [e.lambda2_12, e.lambda2_13] {
                assert!((-1e-12..=1.0 + 1e-12).contains(&l));
            }
        }
        let sp = SchmidtPair::new(0.7, 0.6).unwrap();
        assert_eq!(two_party_eigs(sp, params(0.2, 0.9, 0.4)).lambda1_1, 0.7);
    }

    #[test]
    fn ghzghz_plug_in_values() {
        let e = ghzghz_eigs(UnitaryParams::identity());
        assert!((e.lambda3_123 - 1.0).abs() < 1e-15);
        assert!((e.lambda3_124 - 0.25).abs() < 1e-15);
        let e = ghzghz_eigs(params(0.0, FRAC_PI_4, FRAC_PI_4));
        assert!((e.lambda3_123 - 0.25).abs() < 1e-15);
        assert!((e.lambda3_124 - 0.5).abs() < 1e-15);
        assert!((ghzghz_ggm(params(0.0, FRAC_PI_4, FRAC_PI_4)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ghzghz_swap_symmetry() {
        let mut rng = stream(6, 0);
        for _ in 0..100 {
            let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2));
            let (a, b) = (ghzghz_eigs(params(x, y, z)), ghzghz_eigs(params(y, x, z)));
            assert!((a.lambda3_123 - b.lambda3_123).abs() < 1e-14);
            assert!((a.lambda3_124 - b.lambda3_124).abs() < 1e-14);
        }
    }

    #[test]
    fn ghzghz_against_statevector() {
        let base = ghz().tensor(&ghz()).unwrap();
        let mut rng = stream(7, 0);
        for _ in 0..100 {
            let p = UnitaryParams::clamped(std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2)));
            let s = base.apply_two_qubit(&u_d(p), 2, 3).unwrap();
            let e = ghzghz_eigs(p);
            let s123 = spectrum(&s, &[0, 1, 2]);
            assert!(is_eigenvalue(e.lambda3_123, &s123));
            let mut weights = ghzghz_pauli_weights(p);
            weights.sort_by(|a, b| b.total_cmp(a));
            for (w, x) in weights.iter().zip(&s123) {
                assert!((w - x).abs() < 1e-9);
            }
            assert!((e.lambda3_124 - spectrum(&s, &[0, 1, 3])[0]).abs() < 1e-9);
            for q in [0, 1, 4, 5] {
                assert!((spectrum(&s, &[q])[0] - e.lambda1).abs() < 1e-9);
            }
            let g = crate::ggm::ggm_full(&s).unwrap().value;
            assert!((ghzghz_ggm(p) - g).abs() < 1e-9);
        }
    }

    #[test]
    fn ghzw_against_statevector() {
        let base = ghz().tensor(&w()).unwrap();
        let mut rng = stream(8, 0);
        for _ in 0..100 {
            let p = UnitaryParams::clamped(std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2)));
            let s = base.apply_two_qubit(&u_d(p), 2, 3).unwrap();
            let e = ghzw_eigs(p);
            assert!(is_eigenvalue(e.lambda3_123, &spectrum(&s, &[0, 1, 2])));
            assert!((e.lambda3_124 - spectrum(&s, &[0, 1, 3])[0]).abs() < 1e-9);
            for q in [4, 5] {
                assert!((spectrum(&s, &[q])[0] - e.lambda1).abs() < 1e-9);
            }
        }
    }
}
