//! Dense statevector kernel.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so the bit of
//! qubit `q` in basis index `i` of an `n`-qubit register is
//! `(i >> (n - 1 - q)) & 1`. Tensor products place the left factor's qubits
//! first. Two-qubit operators act on the local basis `|q1 q2>` with `q1` as the
//! more significant bit, whatever the global order of `q1` and `q2`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest register the kernel will allocate.
pub const MAX_QUBITS: usize = 24;

/// Normalization slack accepted by [`StateVector::from_amplitudes`] before renormalizing.
pub const NORM_ACCEPT: f64 = 1e-8;

/// Unitarity tolerance for operators handed to the kernel.
pub const UNITARY_TOL: f64 = 1e-10;

/// Hermiticity tolerance for [`eigvals_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    num_qubits: usize,
}

impl StateVector {
    /// Wraps an amplitude vector, renormalizing away rounding-level drift.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_ACCEPT {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::renormalized(amps, num_qubits))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::renormalized(amps, num_qubits))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_cap(num_qubits)?;
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("a register needs at least one qubit".into()));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps, num_qubits })
    }

    /// `|0...0>`.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    fn renormalized(mut amps: Vec<C64>, num_qubits: usize) -> Self {
        let inv = 1.0 / norm_sqr(&amps).sqrt();
        amps.iter_mut().for_each(|a| *a *= inv);
        Self { amps, num_qubits }
    }

    /// Wraps amplitudes produced by a norm-preserving kernel routine.
    pub(crate) fn from_unitary_image(amps: Vec<C64>, num_qubits: usize) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { amps, num_qubits }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "inner product between {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, with `self`'s qubits first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        check_cap(n)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self::from_unitary_image(amps, n))
    }

    /// Tensor product of several factors, left to right.
    pub fn tensor_all<'a, I>(factors: I) -> Result<StateVector>
    where
        I: IntoIterator<Item = &'a StateVector>,
    {
        let mut iter = factors.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty tensor product".into()))?
            .clone();
        iter.try_fold(first, |acc, f| acc.tensor(f))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::IndexOutOfRange { index: q, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Applies `u` to qubits `(q1, q2)` and the identity elsewhere.
    pub fn apply_two_qubit(&self, u: &Matrix4<C64>, q1: usize, q2: usize) -> Result<StateVector> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::DuplicateQubit(q1));
        }
        let deviation = unitarity_deviation4(u);
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        let mut out = self.clone();
        apply_two_qubit_in_place(&mut out.amps, self.num_qubits, u, q1, q2);
        Ok(out)
    }

    pub fn apply_single_qubit(&self, u: &Matrix2<C64>, q: usize) -> Result<StateVector> {
        self.check_qubit(q)?;
        let deviation = (u.adjoint() * u - Matrix2::identity()).norm();
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        let mut out = self.clone();
        apply_single_qubit_in_place(&mut out.amps, self.num_qubits, u, q);
        Ok(out)
    }

    /// Reorders qubits so that new qubit `k` is old qubit `order[k]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.num_qubits;
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {n} qubits",
                order.len()
            )));
        }
        for &q in order {
            self.check_qubit(q)?;
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.dim()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let mut old_index = 0usize;
            for (k, &q) in order.iter().enumerate() {
                old_index |= bit_of(new_index, k, n) << (n - 1 - q);
            }
            *slot = self.amps[old_index];
        }
        Ok(Self::from_unitary_image(amps, n))
    }

    /// `<σ^z_q>`.
    pub fn expectation_z(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let n = self.num_qubits;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if bit_of(i, q, n) == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    /// `Σ_q <σ^z_q>`.
    pub fn total_z(&self) -> f64 {
        (0..self.num_qubits).map(|q| self.expectation_z(q).unwrap_or(0.0)).sum()
    }

    /// `Tr_{complement}(|s><s|)` in the ascending order of `keep`.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let n = self.num_qubits;
        let mut in_keep = vec![false; n];
        for &q in keep {
            self.check_qubit(q)?;
            if std::mem::replace(&mut in_keep[q], true) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if keep.len() == n {
            return Err(Error::FullSet);
        }
        let mut labels: Vec<usize> = keep.to_vec();
        labels.sort_unstable();
        let env: Vec<usize> = (0..n).filter(|q| !in_keep[*q]).collect();
        let rows = 1usize << labels.len();
        let cols = 1usize << env.len();
        let m = DMatrix::from_fn(rows, cols, |r, c| {
            self.amps[compose_index(&labels, r, &env, c, n)]
        });
        let entries = &m * m.adjoint();
        Ok(DensityMatrix { entries, qubit_labels: labels })
    }
}

/// Free-function form of [`StateVector::tensor`].
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

/// Free-function form of [`StateVector::apply_two_qubit`].
pub fn apply_two_qubit(s: &StateVector, u: &Matrix4<C64>, q1: usize, q2: usize) -> Result<StateVector> {
    s.apply_two_qubit(u, q1, q2)
}

/// Free-function form of [`StateVector::reduced_density`].
pub fn reduced_density(s: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    s.reduced_density(keep)
}

/// Global basis index for subsystem indices `r` (over `a`) and `c` (over `b`).
pub(crate) fn compose_index(a: &[usize], r: usize, b: &[usize], c: usize, n: usize) -> usize {
    let mut index = 0usize;
    let ka = a.len();
    for (k, &q) in a.iter().enumerate() {
        index |= ((r >> (ka - 1 - k)) & 1) << (n - 1 - q);
    }
    let kb = b.len();
    for (k, &q) in b.iter().enumerate() {
        index |= ((c >> (kb - 1 - k)) & 1) << (n - 1 - q);
    }
    index
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub entries: DMatrix<C64>,
    pub qubit_labels: Vec<usize>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigvals(&self) -> Result<Vec<f64>> {
        eigvals_hermitian(&self.entries)
    }
}

/// Largest deviation `max |H_ij - conj(H_ji)|`.
pub fn hermiticity_deviation(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvals_hermitian(h: &DMatrix<C64>) -> Result<Vec<f64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidArgument("eigenvalues of a non-square matrix".into()));
    }
    let deviation = hermiticity_deviation(h);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix, values ascending as returned.
pub(crate) fn eigh(h: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let deviation = hermiticity_deviation(h);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::new(h.clone());
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    let n = len.trailing_zeros() as usize;
    check_cap(n)?;
    Ok(n)
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: n, cap: MAX_QUBITS });
    }
    Ok(())
}

pub(crate) fn unitarity_deviation4(u: &Matrix4<C64>) -> f64 {
    (u.adjoint() * u - Matrix4::identity()).norm()
}

/// In-place two-qubit update on a raw amplitude buffer. Indices must be valid and distinct.
pub(crate) fn apply_two_qubit_in_place(
    amps: &mut [C64],
    n: usize,
    u: &Matrix4<C64>,
    q1: usize,
    q2: usize,
) {
    let m1 = 1usize << (n - 1 - q1);
    let m2 = 1usize << (n - 1 - q2);
    let mut local = [C64::new(0.0, 0.0); 4];
    for base in 0..amps.len() {
        if base & (m1 | m2) != 0 {
            continue;
        }
        let idx = [base, base | m2, base | m1, base | m1 | m2];
        for (k, &i) in idx.iter().enumerate() {
            local[k] = amps[i];
        }
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = u[(r, 0)] * local[0]
                + u[(r, 1)] * local[1]
                + u[(r, 2)] * local[2]
                + u[(r, 3)] * local[3];
        }
    }
}

pub(crate) fn apply_single_qubit_in_place(amps: &mut [C64], n: usize, u: &Matrix2<C64>, q: usize) {
    let m = 1usize << (n - 1 - q);
    for base in 0..amps.len() {
        if base & m != 0 {
            continue;
        }
        let (a0, a1) = (amps[base], amps[base | m]);
        amps[base] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
        amps[base | m] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ghz3() -> StateVector {
        let mut a = vec![c(0.0); 8];
        a[0] = c(FRAC_1_SQRT_2);
        a[7] = c(FRAC_1_SQRT_2);
        StateVector::from_amplitudes(a).unwrap()
    }

    fn w3() -> StateVector {
        let s = 1.0 / 3f64.sqrt();
        StateVector::from_real(&[0.0, s, s, 0.0, s, 0.0, 0.0, 0.0]).unwrap()
    }

    fn cnot() -> Matrix4<C64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.0);
        m[(1, 1)] = c(1.0);
        m[(2, 3)] = c(1.0);
        m[(3, 2)] = c(1.0);
        m
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = StateVector::basis(1, 0).unwrap().tensor(&StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert_eq!(s.amplitude(1), c(1.0));
    }

    #[test]
    fn ghz_tensor_index_arithmetic() {
        let g = ghz3();
        let s = g.tensor(&g).unwrap();
        for i in 0..64 {
            let expected = if [0, 7, 56, 63].contains(&i) { 0.5 } else { 0.0 };
            assert!((s.amplitude(i) - c(expected)).norm() < 1e-15, "index {i}");
        }
        // i * 2^3 + j for basis pairs
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((s.amplitude(i * 8 + j).re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cnot_flips_target() {
        let s = StateVector::basis(2, 0b10).unwrap();
        let out = s.apply_two_qubit(&cnot(), 0, 1).unwrap();
        assert_eq!(out.amplitude(0b11), c(1.0));
        // reversed qubit order puts qubit 1 as control
        let s = StateVector::basis(2, 0b01).unwrap();
        let out = s.apply_two_qubit(&cnot(), 1, 0).unwrap();
        assert_eq!(out.amplitude(0b11), c(1.0));
    }

    #[test]
    fn identity_application_is_noop() {
        let s = w3().tensor(&ghz3()).unwrap();
        let out = s.apply_two_qubit(&Matrix4::identity(), 2, 3).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn apply_rejects_bad_input() {
        let s = ghz3();
        assert!(matches!(
            s.apply_two_qubit(&Matrix4::identity(), 0, 3),
            Err(Error::IndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(s.apply_two_qubit(&Matrix4::identity(), 1, 1), Err(Error::DuplicateQubit(1))));
        let bad = Matrix4::identity() * c(2.0);
        assert!(matches!(s.apply_two_qubit(&bad, 0, 1), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn marginals_of_named_states() {
        let rho = ghz3().reduced_density(&[0]).unwrap();
        assert!((rho.entries[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho.entries[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(rho.entries[(0, 1)].norm() < 1e-15);

        let rho = StateVector::zeros(3).unwrap().reduced_density(&[1, 2]).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!((rho.entries[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((rho.trace() - 1.0).abs() < 1e-15);

        let rho = w3().reduced_density(&[0]).unwrap();
        assert!((rho.entries[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho.entries[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_density_errors() {
        let s = ghz3();
        assert!(matches!(s.reduced_density(&[]), Err(Error::EmptySubset)));
        assert!(matches!(s.reduced_density(&[0, 1, 2]), Err(Error::FullSet)));
        assert!(matches!(s.reduced_density(&[5]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn eigenvalues_sorted_descending() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3), c(0.7)]));
        assert_eq!(eigvals_hermitian(&d).unwrap(), vec![0.7, 0.3]);
        let mixed = DMatrix::from_diagonal_element(4, 4, c(0.25));
        for v in eigvals_hermitian(&mixed).unwrap() {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let mut nh = DMatrix::from_element(2, 2, c(0.0));
        nh[(0, 1)] = c(1.0);
        assert!(matches!(eigvals_hermitian(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn unnormalized_input_rejected() {
        assert!(matches!(StateVector::from_real(&[1.0, 1.0]), Err(Error::NotNormalized(_))));
        assert!(matches!(StateVector::from_real(&[1.0, 0.0, 0.0]), Err(Error::BadLength(3))));
        assert!(StateVector::normalize(vec![c(1.0), c(1.0)]).is_ok());
    }

    #[test]
    fn desk_scale_cap() {
        assert!(matches!(StateVector::zeros(25), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn permutation_moves_qubits() {
        let s = StateVector::basis(3, 0b100).unwrap();
        let p = s.permute_qubits(&[1, 2, 0]).unwrap();
        assert_eq!(p.amplitude(0b001), c(1.0));
    }

    #[test]
    fn z_expectations() {
        let s = w3();
        assert!((s.expectation_z(0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.total_z() - 1.0).abs() < 1e-14);
    }
}
