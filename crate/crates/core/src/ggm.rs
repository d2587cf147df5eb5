//! Generalized geometric measure: `G = 1 - max_{A:B} η²`, where `η²` is the
//! largest eigenvalue of the reduced state on either side of the cut.
//!
//! Cuts are listed by their side containing qubit 0, in ascending bitmask
//! order (bit `q` set for qubit `q`), which fixes the witness on ties.

use crate::error::{Error, Result};
use crate::qstate::{compose_index, StateVector, C64};

/// Eigenvalues within this distance of the maximum count as attaining it.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GgmResult {
    pub value: f64,
    pub witness_cut: Vec<usize>,
    pub lambda_max: f64,
    pub per_cut: Option<Vec<(Vec<usize>, f64)>>,
}

/// Canonical bipartition sides, each containing qubit 0.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("bipartitions need n >= 2, got {n}")));
    }
    Ok(cut_masks(n).map(|m| mask_qubits(m, n)).collect())
}

fn cut_masks(n: usize) -> impl Iterator<Item = u64> {
    let full = (1u64 << n) - 1;
    (1..full).filter(|m| m & 1 == 1)
}

fn mask_qubits(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|q| mask >> q & 1 == 1).collect()
}

#[derive(Clone, Debug)]
struct Cut {
    side: Vec<usize>,
    /// Amplitude index for each entry of the (small side × large side) matrix, row-major.
    gather: Vec<u32>,
    rows: usize,
}

/// Precomputed cut tables for repeated GGM evaluation on a fixed register size.
#[derive(Clone, Debug)]
pub struct GgmEngine {
    n: usize,
    cuts: Vec<Cut>,
}

impl GgmEngine {
    /// All `2^(n-1) - 1` cuts.
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, n)
    }

    /// Only cuts whose smaller side has at most `max_cut_size` qubits.
    pub fn restricted(n: usize, max_cut_size: usize) -> Result<Self> {
        if max_cut_size == 0 {
            return Err(Error::InvalidArgument("max_cut_size must be at least 1".into()));
        }
        Self::build(n, max_cut_size)
    }

    /// Cuts whose side containing qubit 0 satisfies `keep`.
    pub fn filtered(n: usize, keep: impl Fn(&[usize]) -> bool) -> Result<Self> {
        let mut engine = Self::build(n, n)?;
        engine.cuts.retain(|c| keep(&c.side));
        Ok(engine)
    }

    /// `(separating, non_separating)` engines for the qubit pair `(a, b)`.
    /// Spectra of non-separating cuts are unchanged by a unitary on `(a, b)`.
    pub fn split_by_pair(n: usize, a: usize, b: usize) -> Result<(Self, Self)> {
        for q in [a, b] {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, num_qubits: n });
            }
        }
        if a == b {
            return Err(Error::DuplicateQubit(a));
        }
        let separates = move |side: &[usize]| side.contains(&a) != side.contains(&b);
        Ok((Self::filtered(n, separates)?, Self::filtered(n, move |s| !separates(s))?))
    }

    fn build(n: usize, max_small: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("GGM needs at least 2 qubits, got {n}")));
        }
        crate::qstate::check_cap(n)?;
        let cuts = cut_masks(n)
            .filter_map(|mask| {
                let side = mask_qubits(mask, n);
                let rest: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 0).collect();
                let (small, large) =
                    if side.len() <= rest.len() { (&side, &rest) } else { (&rest, &side) };
                if small.len() > max_small {
                    return None;
                }
                let rows = 1usize << small.len();
                let cols = 1usize << large.len();
                let mut gather = Vec::with_capacity(rows * cols);
                for r in 0..rows {
                    for c in 0..cols {
                        gather.push(compose_index(small, r, large, c, n) as u32);
                    }
                }
                Some(Cut { side, gather, rows })
            })
            .collect();
        Ok(Self { n, cuts })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_cuts(&self) -> usize {
        self.cuts.len()
    }

    pub fn cut_sides(&self) -> impl Iterator<Item = &[usize]> {
        self.cuts.iter().map(|c| c.side.as_slice())
    }

    /// Largest eigenvalue of the reduced state across cut `index`.
    pub fn cut_lambda(&self, index: usize, amps: &[C64]) -> f64 {
        let cut = &self.cuts[index];
        let mut scratch = Vec::with_capacity(amps.len());
        let mut rho = Vec::new();
        cut_lambda_with(cut, amps, &mut scratch, &mut rho)
    }

    /// Maximum of the cut eigenvalues and the first cut attaining it.
    pub fn lambda_max(&self, amps: &[C64]) -> (f64, usize) {
        debug_assert_eq!(amps.len(), 1 << self.n);
        let mut scratch = Vec::with_capacity(amps.len());
        let mut rho = Vec::new();
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (i, cut) in self.cuts.iter().enumerate() {
            let lambda = cut_lambda_with(cut, amps, &mut scratch, &mut rho);
            if lambda > best.0 + TIE_TOL {
                best = (lambda, i);
            } else if lambda > best.0 {
                best.0 = lambda;
            }
            if lambda >= 1.0 - 1e-15 {
                break;
            }
        }
        best
    }

    /// GGM value only; the optimizer's objective.
    pub fn value(&self, amps: &[C64]) -> f64 {
        (1.0 - self.lambda_max(amps).0).max(0.0)
    }

    pub fn evaluate(&self, s: &StateVector, keep_per_cut: bool) -> Result<GgmResult> {
        if s.num_qubits() != self.n {
            return Err(Error::InvalidArgument(format!(
                "engine built for {} qubits, state has {}",
                self.n,
                s.num_qubits()
            )));
        }
        if self.cuts.is_empty() {
            return Err(Error::InvalidArgument("engine has no cuts".into()));
        }
        let amps = s.amplitudes();
        if !keep_per_cut {
            let (lambda_max, witness) = self.lambda_max(amps);
            return Ok(GgmResult {
                value: (1.0 - lambda_max).max(0.0),
                witness_cut: self.cuts[witness].side.clone(),
                lambda_max,
                per_cut: None,
            });
        }
        let mut scratch = Vec::with_capacity(amps.len());
        let mut rho = Vec::new();
        let per_cut: Vec<(Vec<usize>, f64)> = self
            .cuts
            .iter()
            .map(|cut| (cut.side.clone(), cut_lambda_with(cut, amps, &mut scratch, &mut rho)))
            .collect();
        let lambda_max = per_cut.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
        let witness = per_cut
            .iter()
            .find(|(_, l)| *l >= lambda_max - TIE_TOL)
            .map(|(s, _)| s.clone())
            .unwrap_or_default();
        Ok(GgmResult {
            value: (1.0 - lambda_max).max(0.0),
            witness_cut: witness,
            lambda_max,
            per_cut: Some(per_cut),
        })
    }
}

fn cut_lambda_with(cut: &Cut, amps: &[C64], scratch: &mut Vec<C64>, rho: &mut Vec<C64>) -> f64 {
    scratch.clear();
    scratch.extend(cut.gather.iter().map(|&i| amps[i as usize]));
    let rows = cut.rows;
    let cols = scratch.len() / rows;
    rho.clear();
    rho.resize(rows * rows, C64::new(0.0, 0.0));
    for r1 in 0..rows {
        let a = &scratch[r1 * cols..(r1 + 1) * cols];
        for r2 in r1..rows {
            let b = &scratch[r2 * cols..(r2 + 1) * cols];
            let mut acc = C64::new(0.0, 0.0);
            for (x, y) in a.iter().zip(b) {
                acc += x * y.conj();
            }
            rho[r1 * rows + r2] = acc;
            rho[r2 * rows + r1] = acc.conj();
        }
    }
    if rows == 2 {
        let (a, d, b) = (rho[0].re, rho[3].re, rho[1]);
        let half = 0.5 * (a - d);
        return 0.5 * (a + d) + (half * half + b.norm_sqr()).sqrt();
    }
    max_eigenvalue_hermitian(rho, rows)
}

/// Largest eigenvalue of a Hermitian matrix stored row-major; destroys the input.
///
/// Householder reduction to a real tridiagonal matrix, then Sturm-sequence
/// bisection for the top eigenvalue.
pub(crate) fn max_eigenvalue_hermitian(a: &mut [C64], n: usize) -> f64 {
    let zero = C64::new(0.0, 0.0);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        diag[k] = a[k * n + k].re;
        let norm_x = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        off[k] = norm_x;
        if k + 2 > n - 1 || norm_x == 0.0 {
            continue;
        }
        // v = x - alpha e1 with alpha = -phase(x0) |x|, normalized
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] += phase * norm_x;
        let vn = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for x in &mut v[k + 1..n] {
            *x /= vn;
        }
        // w = A v - (v^H A v) v on the trailing block
        for i in k + 1..n {
            let mut acc = zero;
            for j in k + 1..n {
                acc += a[i * n + j] * v[j];
            }
            w[i] = acc;
        }
        let kappa: C64 = (k + 1..n).map(|i| v[i].conj() * w[i]).sum();
        for i in k + 1..n {
            w[i] -= kappa * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] -= 2.0 * (v[i] * w[j].conj() + w[i] * v[j].conj());
            }
        }
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1) * n + (n - 1)].re;
    }
    tridiagonal_max_eigenvalue(&diag, &off)
}

fn tridiagonal_max_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    if n == 1 {
        return diag[0];
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { off[i - 1] } else { 0.0 } + if i + 1 < n { off[i] } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let off_sq: Vec<f64> = off.iter().map(|b| b * b).collect();
    // characteristic polynomial det(T - x) and its derivative
    let charpoly = |x: f64| {
        let (mut p0, mut p1) = (1.0, diag[0] - x);
        let (mut d0, mut d1) = (0.0, -1.0);
        for i in 1..n {
            let p2 = (diag[i] - x) * p1 - off_sq[i - 1] * p0;
            let d2 = (diag[i] - x) * d1 - p1 - off_sq[i - 1] * d0;
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        (p1, d1)
    };
    // all roots are real, so Newton from above the spectrum decreases monotonically
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut x = hi + 1e-3 * scale;
    for _ in 0..200 {
        let (p, dp) = charpoly(x);
        if dp == 0.0 || !p.is_finite() {
            break;
        }
        let step = p / dp;
        if !(step > 0.0) {
            break;
        }
        x -= step;
        if step <= 1e-15 * scale {
            return x;
        }
    }
    bisect_top(diag, &off_sq, lo, hi)
}

fn bisect_top(diag: &[f64], off_sq: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let n = diag.len();
    // number of eigenvalues strictly below x
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { off_sq[i - 1] } else { 0.0 };
            q = diag[i] - x - if q != 0.0 { b2 / q } else { b2 / f64::EPSILON };
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// GGM of states reached from a fixed base by unitaries on given qubit pairs.
/// Cuts that no pair separates keep their spectra, so they are evaluated once.
#[derive(Clone, Debug)]
pub struct LinkedGgm {
    moving: GgmEngine,
    fixed_lambda: f64,
}

impl LinkedGgm {
    pub fn new(base: &StateVector, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = base.num_qubits();
        for &(a, b) in pairs {
            for q in [a, b] {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, num_qubits: n });
                }
            }
            if a == b {
                return Err(Error::DuplicateQubit(a));
            }
        }
        let owned = pairs.to_vec();
        let separated = move |side: &[usize]| owned.iter().any(|&(a, b)| side.contains(&a) != side.contains(&b));
        let sep = separated.clone();
        let moving = GgmEngine::filtered(n, sep)?;
        let fixed = GgmEngine::filtered(n, move |s| !separated(s))?;
        let fixed_lambda = if fixed.num_cuts() == 0 { 0.0 } else { fixed.lambda_max(base.amplitudes()).0 };
        Ok(Self { moving, fixed_lambda })
    }

    /// `1 - max λ` over the invariant cuts.
    pub fn upper_bound(&self) -> f64 {
        1.0 - self.fixed_lambda
    }

    pub fn value(&self, amps: &[C64]) -> f64 {
        let moving = if self.moving.num_cuts() == 0 { 0.0 } else { self.moving.lambda_max(amps).0 };
        (1.0 - moving.max(self.fixed_lambda)).max(0.0)
    }
}

/// GGM over every bipartition.
pub fn ggm_full(s: &StateVector) -> Result<GgmResult> {
    GgmEngine::new(s.num_qubits())?.evaluate(s, false)
}

/// GGM over every bipartition, keeping each cut's eigenvalue.
pub fn ggm_full_with_cuts(s: &StateVector) -> Result<GgmResult> {
    GgmEngine::new(s.num_qubits())?.evaluate(s, true)
}

/// GGM over cuts whose smaller side has at most `max_cut_size` qubits (2 for the usual restriction).
pub fn ggm_restricted(s: &StateVector, max_cut_size: usize) -> Result<GgmResult> {
    GgmEngine::restricted(s.num_qubits(), max_cut_size)?.evaluate(s, false)
}
