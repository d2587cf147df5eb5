//! The non-local two-qubit core `U_d = exp[-i(αx XX + αy YY + αz ZZ)]`, the
//! dressed operator `(A1⊗A2) U_d (A3⊗A4)`, and a three-CNOT circuit for `U_d`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::C64;

/// Slack allowed at the edges of `[0, π/2]` for values produced by arithmetic.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub alpha_z: f64,
}

impl UnitaryParams {
    pub const MAX: f64 = FRAC_PI_2;

    pub fn new(alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64| -> Result<f64> {
            if !value.is_finite() || !(-RANGE_SLACK..=Self::MAX + RANGE_SLACK).contains(&value) {
                return Err(Error::ParamOutOfRange { name, value });
            }
            Ok(value.clamp(0.0, Self::MAX))
        };
        Ok(Self {
            alpha_x: check("alpha_x", alpha_x)?,
            alpha_y: check("alpha_y", alpha_y)?,
            alpha_z: check("alpha_z", alpha_z)?,
        })
    }

    /// Projects an arbitrary point onto the box `[0, π/2]^3`.
    pub fn clamped(x: [f64; 3]) -> Self {
        let f = |v: f64| if v.is_finite() { v.clamp(0.0, Self::MAX) } else { 0.0 };
        Self { alpha_x: f(x[0]), alpha_y: f(x[1]), alpha_z: f(x[2]) }
    }

    pub fn identity() -> Self {
        Self { alpha_x: 0.0, alpha_y: 0.0, alpha_z: 0.0 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha_x, self.alpha_y, self.alpha_z]
    }
}

impl fmt::Display for UnitaryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.alpha_x, self.alpha_y, self.alpha_z)
    }
}

impl FromStr for UnitaryParams {
    type Err = Error;

    /// Parses `ax,ay,az` (radians).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("unitary params `{s}`: {e}")))?;
        match parts.as_slice() {
            [ax, ay, az] => Self::new(*ax, *ay, *az),
            _ => Err(Error::InvalidArgument(format!("expected three angles, got `{s}`"))),
        }
    }
}

/// The four entries `(μ1, μ2, μ3, μ4)` of the block form of `U_d`.
pub fn mu_coefficients(p: UnitaryParams) -> [C64; 4] {
    let (ax, ay, az) = (p.alpha_x, p.alpha_y, p.alpha_z);
    let minus = C64::from_polar(1.0, -az);
    let plus = C64::from_polar(1.0, az);
    let i = C64::new(0.0, 1.0);
    [
        minus * (ax - ay).cos(),
        -i * minus * (ax - ay).sin(),
        plus * (ax + ay).cos(),
        -i * plus * (ax + ay).sin(),
    ]
}

/// `U_d(p)` in the basis `|00>, |01>, |10>, |11>`.
pub fn u_d(p: UnitaryParams) -> Matrix4<C64> {
    let [m1, m2, m3, m4] = mu_coefficients(p);
    let z = C64::new(0.0, 0.0);
    Matrix4::new(
        m1, z, z, m2, //
        z, m3, m4, z, //
        z, m4, m3, z, //
        m2, z, z, m1,
    )
}

pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

fn check_unitary2(u: &Matrix2<C64>) -> Result<()> {
    let deviation = (u.adjoint() * u - Matrix2::identity()).norm();
    if deviation > crate::qstate::UNITARY_TOL {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(())
}

/// `(A1⊗A2) U_d(p) (A3⊗A4)`.
pub fn full_u2(
    a1: &Matrix2<C64>,
    a2: &Matrix2<C64>,
    a3: &Matrix2<C64>,
    a4: &Matrix2<C64>,
    p: UnitaryParams,
) -> Result<Matrix4<C64>> {
    for a in [a1, a2, a3, a4] {
        check_unitary2(a)?;
    }
    Ok(kron2(a1, a2) * u_d(p) * kron2(a3, a4))
}

/// Single-qubit unitary from Z-Y-Z Euler angles: `Rz(φ) Ry(θ) Rz(λ)`.
pub fn euler_zyz(phi: f64, theta: f64, lambda: f64) -> Matrix2<C64> {
    rz(phi) * ry(theta) * rz(lambda)
}

/// `exp(-iθZ/2)`.
pub fn rz(theta: f64) -> Matrix2<C64> {
    let z = C64::new(0.0, 0.0);
    Matrix2::new(C64::from_polar(1.0, -theta / 2.0), z, z, C64::from_polar(1.0, theta / 2.0))
}

/// `exp(-iθY/2)`.
pub fn ry(theta: f64) -> Matrix2<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    Matrix2::new(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rotation { axis: Axis, target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn matrix(&self) -> Result<Matrix4<C64>> {
        let id = Matrix2::identity();
        match *self {
            Gate::Rotation { axis, target, angle } => {
                let r = match axis {
                    Axis::Y => ry(angle),
                    Axis::Z => rz(angle),
                };
                match target {
                    0 => Ok(kron2(&r, &id)),
                    1 => Ok(kron2(&id, &r)),
                    t => Err(Error::MalformedGate(format!("rotation target {t} outside {{0,1}}"))),
                }
            }
            Gate::Cnot { control, target } => {
                if control > 1 || target > 1 || control == target {
                    return Err(Error::MalformedGate(format!("CNOT {control} {target}")));
                }
                let one = C64::new(1.0, 0.0);
                let mut m = Matrix4::zeros();
                for basis in 0..4usize {
                    let c_bit = basis >> (1 - control) & 1;
                    let image = if c_bit == 1 { basis ^ (1 << (1 - target)) } else { basis };
                    m[(image, basis)] = one;
                }
                Ok(m)
            }
        }
    }
}

/// Gates in time order plus an explicit global phase.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GateSequence {
    pub gates: Vec<Gate>,
    pub global_phase: f64,
}

impl GateSequence {
    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Rotation { .. })).count()
    }

    /// One gate per line: `RZ q θ`, `RY q θ`, `CNOT c t`, `PHASE θ`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            match g {
                Gate::Rotation { axis, target, angle } => {
                    let name = match axis {
                        Axis::Y => "RY",
                        Axis::Z => "RZ",
                    };
                    out.push_str(&format!("{name} {target} {angle:.16e}\n"));
                }
                Gate::Cnot { control, target } => out.push_str(&format!("CNOT {control} {target}\n")),
            }
        }
        out.push_str(&format!("PHASE {:.16e}\n", self.global_phase));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut seq = GateSequence::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::MalformedGate(format!("line {}: `{line}`", lineno + 1));
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let float = |s: &str| s.parse::<f64>().map_err(|_| bad());
            match fields.as_slice() {
                ["RZ", q, a] | ["RY", q, a] => {
                    let axis = if fields[0] == "RZ" { Axis::Z } else { Axis::Y };
                    seq.gates.push(Gate::Rotation { axis, target: int(q)?, angle: float(a)? });
                }
                ["CNOT", c, t] => seq.gates.push(Gate::Cnot { control: int(c)?, target: int(t)? }),
                ["PHASE", a] => seq.global_phase += float(a)?,
                _ => return Err(bad()),
            }
        }
        Ok(seq)
    }
}

/// Ordered product of the gate matrices times `e^{i·global_phase}`.
pub fn reconstruct(g: &GateSequence) -> Result<Matrix4<C64>> {
    let mut m = Matrix4::identity();
    for gate in &g.gates {
        m = gate.matrix()? * m;
    }
    Ok(m * C64::from_polar(1.0, g.global_phase))
}

/// Three-CNOT, five-rotation circuit for `U_d(p)`:
/// `Rz(π/2)_1, CNOT(1→0), Rz(2αz+π/2)_0, Ry(2αx+π/2)_1, CNOT(0→1), Ry(-2αy-π/2)_1, CNOT(1→0), Rz(-π/2)_0`,
/// with global phase π/4. The identity point returns an empty circuit.
pub fn decompose_u_d(p: UnitaryParams) -> GateSequence {
    if p.to_array().iter().all(|a| *a == 0.0) {
        return GateSequence::default();
    }
    let rot = |axis, target, angle| Gate::Rotation { axis, target, angle };
    GateSequence {
        gates: vec![
            rot(Axis::Z, 1, FRAC_PI_2),
            Gate::Cnot { control: 1, target: 0 },
            rot(Axis::Z, 0, 2.0 * p.alpha_z + FRAC_PI_2),
            rot(Axis::Y, 1, 2.0 * p.alpha_x + FRAC_PI_2),
            Gate::Cnot { control: 0, target: 1 },
            rot(Axis::Y, 1, -2.0 * p.alpha_y - FRAC_PI_2),
            Gate::Cnot { control: 1, target: 0 },
            rot(Axis::Z, 0, -FRAC_PI_2),
        ],
        global_phase: FRAC_PI_4,
    }
}

/// `|Tr(A†B)| / 4`, equal to 1 iff the operators agree up to a global phase.
pub fn phase_fidelity(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a.adjoint() * b).trace().norm() / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::eigh;
    use crate::rng::stream;
    use nalgebra::DMatrix;
    use rand::Rng;

    fn pauli_pair(k: usize) -> Matrix4<C64> {
        let z0 = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let single = match k {
            0 => Matrix2::new(z0, one, one, z0),
            1 => Matrix2::new(z0, -i, i, z0),
            _ => Matrix2::new(one, z0, z0, -one),
        };
        kron2(&single, &single)
    }

    /// `exp(-iH)` of the generator through a Hermitian eigendecomposition.
    fn u_d_by_exponential(p: UnitaryParams) -> Matrix4<C64> {
        let h = pauli_pair(0) * C64::new(p.alpha_x, 0.0)
            + pauli_pair(1) * C64::new(p.alpha_y, 0.0)
            + pauli_pair(2) * C64::new(p.alpha_z, 0.0);
        let hd = DMatrix::from_fn(4, 4, |r, c| h[(r, c)]);
        let (vals, vecs) = eigh(&hd).unwrap();
        let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            vals.iter().map(|v| C64::from_polar(1.0, -v)),
        ));
        let u = &vecs * phases * vecs.adjoint();
        Matrix4::from_fn(|r, c| u[(r, c)])
    }

    fn random_params(rng: &mut impl Rng) -> UnitaryParams {
        UnitaryParams::clamped(std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2)))
    }

    #[test]
    fn block_form_matches_exponential() {
        let mut rng = stream(1, 1);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            assert!((u_d(p) - u_d_by_exponential(p)).norm() < 1e-12);
        }
    }

    #[test]
    fn special_points() {
        assert!((u_d(UnitaryParams::identity()) - Matrix4::identity()).norm() < 1e-15);
        let i = C64::new(0.0, 1.0);
        let expected = Matrix4::from_diagonal(&nalgebra::Vector4::new(-i, i, i, -i));
        assert!((u_d(UnitaryParams::new(0.0, 0.0, FRAC_PI_2).unwrap()) - expected).norm() < 1e-15);
        let [m1, m2, m3, m4] = mu_coefficients(UnitaryParams::new(FRAC_PI_4, FRAC_PI_4, 0.0).unwrap());
        assert!((m1 - 1.0).norm() < 1e-15 && m2.norm() < 1e-15 && m3.norm() < 1e-15);
        assert!((m4 + i).norm() < 1e-15);
    }

    #[test]
    fn unitary_and_block_diagonal_on_grid() {
        let step = FRAC_PI_2 / 16.0;
        for a in 0..17 {
            for b in 0..17 {
                for c in 0..17 {
                    let p = UnitaryParams::new(a as f64 * step, b as f64 * step, c as f64 * step).unwrap();
                    let u = u_d(p);
                    assert!((u.adjoint() * u - Matrix4::identity()).norm() <= 1e-12);
                    for (r, col) in [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
                        assert_eq!(u[(r, col)], C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn basis_action() {
        let mut rng = stream(2, 2);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let [m1, m2, m3, m4] = mu_coefficients(p);
            let u = u_d(p);
            // columns: U|00> = μ1|00> + μ2|11>, U|01> = μ3|01> + μ4|10>, ...
            assert_eq!((u[(0, 0)], u[(3, 0)]), (m1, m2));
            assert_eq!((u[(1, 1)], u[(2, 1)]), (m3, m4));
            assert_eq!((u[(2, 2)], u[(1, 2)]), (m3, m4));
            assert_eq!((u[(3, 3)], u[(0, 3)]), (m1, m2));
        }
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(UnitaryParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(UnitaryParams::new(0.0, 2.0, 0.0).is_err());
        assert!(UnitaryParams::new(0.0, 0.0, f64::NAN).is_err());
        assert_eq!("0.3, 0.7,0.2".parse::<UnitaryParams>().unwrap().alpha_y, 0.7);
        assert!("0.3,0.7".parse::<UnitaryParams>().is_err());
    }

    #[test]
    fn dressed_unitary() {
        let id = Matrix2::identity();
        let p = UnitaryParams::new(0.2, 0.5, 1.1).unwrap();
        assert!((full_u2(&id, &id, &id, &id, p).unwrap() - u_d(p)).norm() < 1e-15);
        let bad = id * C64::new(1.5, 0.0);
        assert!(matches!(full_u2(&bad, &id, &id, &id, p), Err(Error::NonUnitary { .. })));
        let a = euler_zyz(0.3, 1.2, -0.4);
        assert!((a.adjoint() * a - Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn cnot_and_empty_reconstruction() {
        let m = reconstruct(&GateSequence {
            gates: vec![Gate::Cnot { control: 0, target: 1 }],
            global_phase: 0.0,
        })
        .unwrap();
        let one = C64::new(1.0, 0.0);
        assert_eq!(m[(0, 0)], one);
        assert_eq!(m[(1, 1)], one);
        assert_eq!(m[(3, 2)], one);
        assert_eq!(m[(2, 3)], one);
        assert_eq!(reconstruct(&GateSequence::default()).unwrap(), Matrix4::identity());
        let bad = GateSequence { gates: vec![Gate::Cnot { control: 1, target: 1 }], global_phase: 0.0 };
        assert!(matches!(reconstruct(&bad), Err(Error::MalformedGate(_))));
    }

    #[test]
    fn decomposition_round_trip() {
        let seq = decompose_u_d(UnitaryParams::identity());
        assert!(seq.gates.is_empty());
        assert_eq!(seq.global_phase, 0.0);
        let p = UnitaryParams::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).unwrap();
        let rebuilt = reconstruct(&decompose_u_d(p)).unwrap();
        assert!(phase_fidelity(&rebuilt, &u_d(p)) >= 1.0 - 1e-10);
        assert!((rebuilt - u_d(p)).norm() < 1e-12, "global phase tracked exactly");
        let mut rng = stream(3, 3);
        for _ in 0..1000 {
            let p = random_params(&mut rng);
            let seq = decompose_u_d(p);
            assert!(seq.cnot_count() <= 3 && seq.rotation_count() <= 5);
            assert!(phase_fidelity(&reconstruct(&seq).unwrap(), &u_d(p)) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn circuit_text_round_trip() {
        let seq = decompose_u_d(UnitaryParams::new(0.3, 0.7, 0.2).unwrap());
        let text = seq.to_text();
        assert!(text.lines().next().unwrap().starts_with("RZ 1 "));
        assert!(text.contains("CNOT 1 0"));
        assert_eq!(GateSequence::from_text(&text).unwrap(), seq);
        assert!(GateSequence::from_text("RX 0 1.0").is_err());
    }
}
