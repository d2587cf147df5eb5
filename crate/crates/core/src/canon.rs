//! Named unit states and random state samplers.

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::qstate::{StateVector, C64};

fn real(a: f64) -> C64 {
    C64::new(a, 0.0)
}

/// `(|000> + |111>)/√2`.
pub fn ghz() -> StateVector {
    g_ghz(std::f64::consts::FRAC_PI_4)
}

/// `(|001> + |010> + |100>)/√3`.
pub fn w() -> StateVector {
    dicke(3, 1).expect("valid Dicke parameters")
}

/// `(|011> + |101> + |110>)/√3`.
pub fn wbar() -> StateVector {
    dicke(3, 2).expect("valid Dicke parameters")
}

/// `cos θ|000> + sin θ|111>`.
pub fn g_ghz(theta: f64) -> StateVector {
    let mut amps = vec![real(0.0); 8];
    amps[0] = real(theta.cos());
    amps[7] = real(theta.sin());
    StateVector::from_amplitudes(amps).expect("unit norm by construction")
}

/// `cos θ1|001> + cos θ2 sin θ1|010> + sin θ2 sin θ1|100>`.
pub fn g_w(theta1: f64, theta2: f64) -> StateVector {
    let mut amps = vec![real(0.0); 8];
    amps[0b001] = real(theta1.cos());
    amps[0b010] = real(theta2.cos() * theta1.sin());
    amps[0b100] = real(theta2.sin() * theta1.sin());
    StateVector::from_amplitudes(amps).expect("unit norm by construction")
}

/// Equal superposition of all weight-`k` basis states on `n` qubits.
pub fn dicke(n: usize, k: usize) -> Result<StateVector> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!("Dicke state D({n},{k})")));
    }
    crate::qstate::check_cap(n)?;
    let dim = 1usize << n;
    let count = (0..dim).filter(|i| i.count_ones() as usize == k).count();
    let amp = 1.0 / (count as f64).sqrt();
    let amps = (0..dim)
        .map(|i| if i.count_ones() as usize == k { real(amp) } else { real(0.0) })
        .collect();
    StateVector::from_amplitudes(amps)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random pure state: i.i.d. complex Gaussians, normalized.
pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("Haar state on zero qubits".into()));
    }
    crate::qstate::check_cap(n)?;
    let amps = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalize(amps)
}

/// Haar-random element of SU(2) from a normalized Gaussian quaternion.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let (a, b) = loop {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-12 {
            break (a / norm, b / norm);
        }
    };
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Random W-class state: `√a|000> + √b|001> + √c|010> + √d|100>` with
/// `(a, b, c, d)` uniform on the simplex, then independent Haar-random local
/// unitaries on each qubit. Draws with a product cut are rejected.
pub fn random_w_class<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    loop {
        // uniform on the simplex via normalized exponentials
        let e: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
        let total: f64 = e.iter().sum();
        let mut amps = vec![real(0.0); 8];
        for (slot, weight) in [0b000, 0b001, 0b010, 0b100].into_iter().zip(e) {
            amps[slot] = real((weight / total).sqrt());
        }
        let mut state = StateVector::from_amplitudes(amps).expect("unit norm by construction");
        for q in 0..3 {
            state = state.apply_single_qubit(&haar_su2(rng), q).expect("SU(2) is unitary");
        }
        if crate::ggm::ggm_full(&state).map(|g| g.value > 1e-9).unwrap_or(false) {
            return state;
        }
    }
}

/// Three-tangle `4|d1 - 2 d2 + 4 d3|` from the Cayley hyperdeterminant.
pub fn three_tangle(s: &StateVector) -> Result<f64> {
    if s.num_qubits() != 3 {
        return Err(Error::InvalidArgument("three-tangle needs a 3-qubit state".into()));
    }
    let a = |i: usize| s.amplitude(i);
    let (a000, a001, a010, a011) = (a(0), a(1), a(2), a(3));
    let (a100, a101, a110, a111) = (a(4), a(5), a(6), a(7));
    let sq = |z: C64| z * z;
    let d1 = sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011);
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok(4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn named_states() {
        let g = ghz();
        assert!((g.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.amplitude(7).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let wb = wbar();
        let flipped = (0..8).map(|i| w().amplitude(7 - i)).collect::<Vec<_>>();
        assert_eq!(wb.amplitudes(), flipped.as_slice());
    }

    #[test]
    fn generalized_families() {
        let s = g_w(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4);
        assert!((s.amplitude(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitude(2).re - 0.5).abs() < 1e-15);
        assert!((s.amplitude(4).re - 0.5).abs() < 1e-15);
        assert!(ghz().fidelity(&g_ghz(std::f64::consts::FRAC_PI_4)).unwrap() > 1.0 - 1e-15);
    }

    #[test]
    fn dicke_states() {
        assert_eq!(dicke(3, 1).unwrap(), w());
        let d = dicke(4, 1).unwrap();
        for i in [1, 2, 4, 8] {
            assert!((d.amplitude(i).re - 0.5).abs() < 1e-15);
        }
        assert!(dicke(3, 4).is_err());
        assert!((dicke(5, 0).unwrap().amplitude(0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dicke_is_permutation_invariant() {
        let d = dicke(5, 2).unwrap();
        for order in [[4, 3, 2, 1, 0], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3]] {
            let p = d.permute_qubits(&order).unwrap();
            assert!((d.fidelity(&p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_samples_are_normalized_and_distinct() {
        let a = haar_random(3, &mut stream(1, 0)).unwrap();
        let b = haar_random(3, &mut stream(2, 0)).unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(a.fidelity(&b).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn w_class_has_zero_tangle() {
        let mut rng = stream(11, 0);
        for _ in 0..50 {
            let s = random_w_class(&mut rng);
            assert!(three_tangle(&s).unwrap() < 1e-10);
            assert!(crate::ggm::ggm_full(&s).unwrap().value > 0.0);
        }
        assert!(three_tangle(&w()).unwrap() < 1e-15);
        assert!((three_tangle(&ghz()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn su2_is_unitary() {
        let mut rng = stream(5, 5);
        for _ in 0..20 {
            let u = haar_su2(&mut rng);
            assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-14);
        }
    }
}
