//! Merging by two-qubit XYZ spin evolution
//! `H = J/4 [(1+γ) XX + (1-γ) YY] + ΔJ/4 ZZ`, propagated exactly.
//!
//! Each link evolves for the same time `t`, links taken in order. Time points
//! are computed directly from the initial state, never stepped.

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon;
use crate::error::{Error, Result};
use crate::ggm::LinkedGgm;
use crate::qstate::{apply_two_qubit_in_place, check_cap, eigh, StateVector, C64};
use crate::table::CsvTable;

/// Default time step, in units of 1/J.
pub const DEFAULT_DT: f64 = 0.05;

/// Plateau flatness: values within this of a common level.
pub const PLATEAU_TOL: f64 = 1e-6;

/// Revival threshold for numeric period detection.
pub const REVIVAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub j: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl HamiltonianParams {
    pub fn new(j: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(j.is_finite() && gamma.is_finite() && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite Hamiltonian parameters ({j}, {gamma}, {delta})")));
        }
        Ok(Self { j, gamma, delta })
    }

    /// Isotropic XY coupling, γ = Δ = 0.
    pub fn xy(j: f64) -> Self {
        Self { j, gamma: 0.0, delta: 0.0 }
    }

    pub fn with_j(self, j: f64) -> Self {
        Self { j, ..self }
    }
}

pub fn h_xyz(hp: HamiltonianParams) -> Matrix4<C64> {
    let c = |v: f64| C64::new(v, 0.0);
    let (j, g, d) = (hp.j, hp.gamma, hp.delta);
    // <00|YY|11> = -1, <01|YY|10> = +1
    let xx_yy_flip = j / 4.0 * ((1.0 + g) - (1.0 - g)); // <00|H|11>
    let xx_yy_hop = j / 4.0 * ((1.0 + g) + (1.0 - g)); // <01|H|10>
    let zz = d * j / 4.0;
    let mut h = Matrix4::from_element(c(0.0));
    h[(0, 0)] = c(zz);
    h[(1, 1)] = c(-zz);
    h[(2, 2)] = c(-zz);
    h[(3, 3)] = c(zz);
    h[(0, 3)] = c(xx_yy_flip);
    h[(3, 0)] = c(xx_yy_flip);
    h[(1, 2)] = c(xx_yy_hop);
    h[(2, 1)] = c(xx_yy_hop);
    h
}

/// `exp(-i H t)` for a fixed `H`, from one eigendecomposition.
#[derive(Clone, Debug)]
pub struct Propagator {
    vals: [f64; 4],
    vecs: Matrix4<C64>,
}

impl Propagator {
    pub fn new(hp: HamiltonianParams) -> Result<Self> {
        let h = h_xyz(hp);
        let (vals, vecs) = eigh(&DMatrix::from_fn(4, 4, |r, c| h[(r, c)]))?;
        Ok(Self {
            vals: [vals[0], vals[1], vals[2], vals[3]],
            vecs: Matrix4::from_fn(|r, c| vecs[(r, c)]),
        })
    }

    pub fn at(&self, t: f64) -> Matrix4<C64> {
        let mut scaled = self.vecs;
        for (k, lam) in self.vals.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lam * t);
            for r in 0..4 {
                scaled[(r, k)] *= phase;
            }
        }
        scaled * self.vecs.adjoint()
    }
}

pub fn propagator(hp: HamiltonianParams, t: f64) -> Result<Matrix4<C64>> {
    Ok(Propagator::new(hp)?.at(t))
}

pub fn evolve_pair(s: &StateVector, q1: usize, q2: usize, hp: HamiltonianParams, t: f64) -> Result<StateVector> {
    s.apply_two_qubit(&propagator(hp, t)?, q1, q2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionLink {
    pub a: usize,
    pub b: usize,
    pub hp: HamiltonianParams,
}

impl EvolutionLink {
    pub fn new(a: usize, b: usize, hp: HamiltonianParams) -> Self {
        Self { a, b, hp }
    }
}

/// An initial register plus an ordered list of evolving links.
#[derive(Clone, Debug)]
pub struct Evolution {
    initial: StateVector,
    links: Vec<(usize, usize, Propagator)>,
}

impl Evolution {
    pub fn new(initial: StateVector, links: &[EvolutionLink]) -> Result<Self> {
        let n = initial.num_qubits();
        let mut props = Vec::with_capacity(links.len());
        for l in links {
            for q in [l.a, l.b] {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, num_qubits: n });
                }
            }
            if l.a == l.b {
                return Err(Error::DuplicateQubit(l.a));
            }
            props.push((l.a, l.b, Propagator::new(l.hp)?));
        }
        Ok(Self { initial, links: props })
    }

    pub fn from_units(units: &[StateVector], links: &[EvolutionLink]) -> Result<Self> {
        Self::new(StateVector::tensor_all(units)?, links)
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn num_qubits(&self) -> usize {
        self.initial.num_qubits()
    }

    pub fn amplitudes_at(&self, t: f64) -> Vec<C64> {
        let n = self.num_qubits();
        let mut amps = self.initial.amplitudes().to_vec();
        for (a, b, p) in &self.links {
            apply_two_qubit_in_place(&mut amps, n, &p.at(t), *a, *b);
        }
        amps
    }

    /// GGM evaluator that skips cuts no link separates.
    pub fn ggm_evaluator(&self) -> Result<LinkedGgm> {
        let pairs: Vec<(usize, usize)> = self.links.iter().map(|(a, b, _)| (*a, *b)).collect();
        LinkedGgm::new(&self.initial, &pairs)
    }

    pub fn ggm_at(&self, eval: &LinkedGgm, t: f64) -> f64 {
        eval.value(&self.amplitudes_at(t))
    }

    pub fn state_at(&self, t: f64) -> StateVector {
        StateVector::from_unitary_image(self.amplitudes_at(t), self.num_qubits())
    }

    /// `|<Ψ(0)|Ψ(t)>|²`.
    pub fn revival_fidelity(&self, t: f64) -> f64 {
        let amps = self.amplitudes_at(t);
        let ov: C64 = self.initial.amplitudes().iter().zip(&amps).map(|(a, b)| a.conj() * b).sum();
        ov.norm_sqr()
    }

    /// Smallest `t` in `(0, t_max]` with revival fidelity at least `1 - REVIVAL_TOL`.
    /// The grid locates candidate maxima, golden-section search refines them.
    pub fn revival_period(&self, t_max: f64, dt: f64) -> Result<Option<f64>> {
        check_step(t_max, dt)?;
        let grid = time_grid(t_max, dt)?;
        let f: Vec<f64> = grid.par_iter().map(|&t| self.revival_fidelity(t)).collect();
        for k in 1..grid.len() {
            let left = f[k - 1];
            let right = f.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
            if f[k] < left || f[k] < right || f[k] < 0.5 {
                continue;
            }
            let hi = grid.get(k + 1).copied().unwrap_or(grid[k]);
            let t = golden_max(|t| self.revival_fidelity(t), grid[k - 1], hi, 1e-13);
            let best = if self.revival_fidelity(t) >= f[k] { t } else { grid[k] };
            if self.revival_fidelity(best) >= 1.0 - REVIVAL_TOL {
                return Ok(Some(best));
            }
        }
        Ok(None)
    }
}

fn check_step(t_max: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite() && t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad time grid t_max={t_max}, dt={dt}")));
    }
    Ok(())
}

/// `0, dt, 2dt, ...` up to `t_max` inclusive (with rounding slack).
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    check_step(t_max, dt)?;
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Initial-state label.
    pub tag: String,
    pub hp: Vec<HamiltonianParams>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, tag: impl Into<String>, hp: Vec<HamiltonianParams>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!("{} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("times must be strictly ascending".into()));
        }
        Ok(Self { times, values, tag: tag.into(), hp })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self, value_column: &str) -> CsvTable {
        let mut t = CsvTable::new(&[("t", "1/J"), (value_column, "1")]);
        t.comment("state", &self.tag);
        for (k, hp) in self.hp.iter().enumerate() {
            t.comment(&format!("link{k}"), format!("J={} gamma={} delta={}", hp.j, hp.gamma, hp.delta));
        }
        for (x, y) in self.times.iter().zip(&self.values) {
            t.push_row([x, y]);
        }
        t
    }
}

/// GGM of the evolved composite at each time, in parallel over `times`.
pub fn ggm_timeseries(units: &[StateVector], links: &[EvolutionLink], times: &[f64], tag: &str) -> Result<TimeSeries> {
    let evo = Evolution::from_units(units, links)?;
    let eval = evo.ggm_evaluator()?;
    let values: Vec<f64> = times.par_iter().map(|&t| evo.ggm_at(&eval, t)).collect();
    TimeSeries::new(times.to_vec(), values, tag, links.iter().map(|l| l.hp).collect())
}

/// Largest deviation `max_t |G(t + tau) - G(t)|` over the probe times.
pub fn ggm_shift_deviation(evo: &Evolution, eval: &LinkedGgm, probes: &[f64], tau: f64) -> f64 {
    probes
        .par_iter()
        .map(|&t| (evo.ggm_at(eval, t + tau) - evo.ggm_at(eval, t)).abs())
        .reduce(|| 0.0, f64::max)
}

/// Smallest shift `tau` in `(0, tau_max]` under which GGM repeats to within
/// `tol` on the probe times. Candidates come from a `dt` scan, then a
/// golden-section refinement of each local minimum.
pub fn ggm_period(
    evo: &Evolution,
    probes: &[f64],
    tau_max: f64,
    dt: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let engine = evo.ggm_evaluator()?;
    let taus = time_grid(tau_max, dt)?;
    let dev: Vec<f64> = taus.iter().map(|&tau| ggm_shift_deviation(evo, &engine, probes, tau)).collect();
    for k in 1..taus.len() {
        let right = dev.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if dev[k] > dev[k - 1] || dev[k] > right {
            continue;
        }
        let hi = taus.get(k + 1).copied().unwrap_or(taus[k]);
        let tau = golden_max(|x| -ggm_shift_deviation(evo, &engine, probes, x), taus[k - 1], hi, 1e-12);
        if ggm_shift_deviation(evo, &engine, probes, tau) < tol {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Plateau {
    pub t_start: f64,
    pub t_end: f64,
    pub value: f64,
    pub points: usize,
}

impl Plateau {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Maximal runs of at least `min_points` samples lying within `tol` of one
/// level (spread at most `2 tol`), scanned left to right.
pub fn detect_plateaus(series: &TimeSeries, tol: f64, min_points: usize) -> Vec<Plateau> {
    let v = &series.values;
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let (mut lo, mut hi) = (v[i], v[i]);
        let mut j = i + 1;
        while j < v.len() && v[j].max(hi) - v[j].min(lo) < 2.0 * tol {
            lo = lo.min(v[j]);
            hi = hi.max(v[j]);
            j += 1;
        }
        if j - i >= min_points.max(2) {
            out.push(Plateau {
                t_start: series.times[i],
                t_end: series.times[j - 1],
                value: 0.5 * (lo + hi),
                points: j - i,
            });
        }
        i = if j - i >= 2 { j } else { i + 1 };
    }
    out
}

/// `|W> ⊗ |0>^n_aux`, then pairs `(2,3), (3,4), ...` evolved in order for time `t`.
pub fn dicke_growth(n_aux: usize, hp: HamiltonianParams, t: f64) -> Result<StateVector> {
    if n_aux == 0 {
        return Err(Error::InvalidArgument("need at least one auxiliary qubit".into()));
    }
    check_cap(n_aux + 3)?;
    let zeros = StateVector::basis(n_aux, 0)?;
    let initial = canon::w().tensor(&zeros)?;
    let links: Vec<EvolutionLink> = (2..n_aux + 2).map(|q| EvolutionLink::new(q, q + 1, hp)).collect();
    Ok(Evolution::new(initial, &links)?.state_at(t))
}

/// Unnormalized `|Z_N>` on `N + 1` qubits (`N >= 1`), squared norm `2^(2N-1)`.
pub fn z_state(n: usize, j: f64, t: f64) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("Z_N is defined for N >= 1".into()));
    }
    check_cap(n + 1)?;
    let minus = C64::from_polar(1.0, -j * t / 2.0);
    let plus = C64::from_polar(1.0, j * t / 2.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // Z_1 = e^{-iJt/2}|ψ+> + e^{iJt/2}|ψ->, |ψ±> = (±|01> + |10>)/√2
    let mut z = vec![C64::new(0.0, 0.0), (minus - plus) * r, (minus + plus) * r, C64::new(0.0, 0.0)];
    for m in 2..=n {
        let half = 1usize << m;
        let lead = 2f64.powf((2 * m) as f64 / 2.0 - 1.5);
        let mut next = vec![C64::new(0.0, 0.0); 2 * half];
        // e^{-iJt/2}(|0>Z + c|1>|0..0>) + e^{iJt/2}(-|0>Z + c|1>|0..0>)
        for (k, a) in z.iter().enumerate() {
            next[k] = (minus - plus) * a;
        }
        next[half] = (minus + plus) * lead;
        z = next;
    }
    Ok(z)
}

pub fn z_norm_sqr(n: usize, j: f64, t: f64) -> Result<f64> {
    Ok(z_state(n, j, t)?.iter().map(|a| a.norm_sqr()).sum())
}

/// Closed form of [`dicke_growth`] for γ = Δ = 0:
/// `√(2/3)|ψ+>|0>^{N+1} + 2^{-(2N-1)/2}/√3 |00>|Z_N>`.
pub fn dicke_closed_form(n_aux: usize, j: f64, t: f64) -> Result<StateVector> {
    let z = z_state(n_aux, j, t)?;
    let n = n_aux + 3;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let tail = n_aux + 1;
    let a = (2.0f64 / 3.0).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    amps[0b01 << tail] = C64::new(a, 0.0);
    amps[0b10 << tail] = C64::new(a, 0.0);
    let scale = 1.0 / (2f64.powf((2 * n_aux) as f64 / 2.0 - 0.5) * 3f64.sqrt());
    for (k, zk) in z.iter().enumerate() {
        amps[k] += zk * scale;
    }
    StateVector::from_amplitudes(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggm::ggm_full;
    use std::f64::consts::PI;

    fn close(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn xy_basis_action() {
        for &j in &[0.5, 1.0, 2.0, -0.7] {
            let hp = HamiltonianParams::xy(j);
            for &t in &[0.0, 0.3, 1.7, 9.1] {
                let u = propagator(hp, t).unwrap();
                let (c, s) = ((j * t / 2.0).cos(), (j * t / 2.0).sin());
                // |10> is index 2
                assert!((u[(2, 2)] - C64::new(c, 0.0)).norm() < 1e-13);
                assert!((u[(1, 2)] - C64::new(0.0, -s)).norm() < 1e-13);
                assert!((u[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-13);
                assert!((u[(3, 3)] - C64::new(1.0, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn ising_limit_is_half_j_xx() {
        let h = h_xyz(HamiltonianParams::new(1.3, 1.0, 0.0).unwrap());
        let x = Matrix4::from_fn(|r, c| if r + c == 3 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        assert!(close(&h, &(x * C64::new(0.65, 0.0))) < 1e-15);
    }

    #[test]
    fn hamiltonian_against_pauli_products() {
        let hp = HamiltonianParams::new(0.9, 0.3, -1.4).unwrap();
        let o = C64::new(0.0, 0.0);
        let p = |k: usize| match k {
            1 => nalgebra::Matrix2::new(o, C64::new(1.0, 0.0), C64::new(1.0, 0.0), o),
            2 => nalgebra::Matrix2::new(o, C64::new(0.0, -1.0), C64::new(0.0, 1.0), o),
            _ => nalgebra::Matrix2::new(C64::new(1.0, 0.0), o, o, C64::new(-1.0, 0.0)),
        };
        let kron = |a, b| crate::unitary::kron2(&a, &b);
        let want = kron(p(1), p(1)) * C64::new(hp.j / 4.0 * (1.0 + hp.gamma), 0.0)
            + kron(p(2), p(2)) * C64::new(hp.j / 4.0 * (1.0 - hp.gamma), 0.0)
            + kron(p(3), p(3)) * C64::new(hp.delta * hp.j / 4.0, 0.0);
        assert!(close(&h_xyz(hp), &want) < 1e-15);
    }

    #[test]
    fn propagator_unitary_and_zero_time() {
        let hp = HamiltonianParams::new(1.1, 0.4, 0.7).unwrap();
        assert!(close(&propagator(hp, 0.0).unwrap(), &Matrix4::identity()) < 1e-14);
        let u = propagator(hp, 3.3).unwrap();
        assert!(close(&(u.adjoint() * u), &Matrix4::identity()) < 1e-13);
    }

    #[test]
    fn xy_quarter_and_full_periods() {
        let j = 1.0;
        let hp = HamiltonianParams::xy(j);
        // at 2π/J the flip-flop block is -1: the propagator is Z⊗Z
        let zz = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, 1.0).map(|v| C64::new(v, 0.0)));
        assert!(close(&propagator(hp, 2.0 * PI / j).unwrap(), &zz) < 1e-13);
        assert!(close(&propagator(hp, 4.0 * PI / j).unwrap(), &Matrix4::identity()) < 1e-13);
    }

    #[test]
    fn norm_and_excitations_conserved() {
        let units = [canon::w(), canon::g_ghz(0.4)];
        let evo = Evolution::from_units(&units, &[EvolutionLink::new(2, 3, HamiltonianParams::new(0.8, 0.0, 0.6).unwrap())]).unwrap();
        let z0 = evo.initial().total_z();
        for k in 0..40 {
            let s = evo.state_at(0.37 * k as f64);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((s.total_z() - z0).abs() < 1e-10);
        }
    }

    #[test]
    fn ww_bounded_by_untouched_marginal() {
        let times = time_grid(4.0 * PI, 0.05).unwrap();
        let s = ggm_timeseries(&[canon::w(), canon::w()], &[EvolutionLink::new(2, 3, HamiltonianParams::xy(1.0))], &times, "W⊗W").unwrap();
        assert!(s.max_value() <= 1.0 / 3.0 + 1e-9);
        assert!(s.values[0].abs() < 1e-12);
        assert!(s.values.iter().any(|v| (v - 1.0 / 3.0).abs() < 1e-6));
    }

    #[test]
    fn ghzghz_ggm_period_two_pi() {
        let evo = Evolution::from_units(&[canon::ghz(), canon::ghz()], &[EvolutionLink::new(2, 3, HamiltonianParams::xy(1.0))]).unwrap();
        let engine = evo.ggm_evaluator().unwrap();
        let probes: Vec<f64> = (0..12).map(|k| 0.41 * k as f64 + 0.05).collect();
        assert!(ggm_shift_deviation(&evo, &engine, &probes, 2.0 * PI) < 1e-12);
        let tau = ggm_period(&evo, &probes, 7.0, 0.1, 1e-8).unwrap().unwrap();
        assert!((tau - 2.0 * PI).abs() < 1e-6, "{tau}");
        // the state itself returns only after 4π
        assert!(evo.revival_fidelity(2.0 * PI) < 1e-12);
        let p = evo.revival_period(14.0, 0.05).unwrap().unwrap();
        assert!((p - 4.0 * PI).abs() < 1e-6, "{p}");
    }

    #[test]
    fn plateaus_and_time_scaling() {
        let link = |j| [EvolutionLink::new(2, 3, HamiltonianParams::xy(j))];
        let units = [canon::ghz(), canon::ghz()];
        let t1 = time_grid(2.0 * PI, 0.05).unwrap();
        let t2: Vec<f64> = t1.iter().map(|t| t / 2.0).collect();
        let s1 = ggm_timeseries(&units, &link(1.0), &t1, "GHZ⊗GHZ").unwrap();
        let s2 = ggm_timeseries(&units, &link(2.0), &t2, "GHZ⊗GHZ").unwrap();
        for (a, b) in s1.values.iter().zip(&s2.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let p1 = detect_plateaus(&s1, PLATEAU_TOL, 3);
        let p2 = detect_plateaus(&s2, PLATEAU_TOL, 3);
        assert!(!p1.is_empty());
        assert_eq!(p1.len(), p2.len());
        for (a, b) in p1.iter().zip(&p2) {
            assert!((a.duration() - 2.0 * b.duration()).abs() < 1e-12);
        }
    }

    #[test]
    fn plateau_detection_on_synthetic_series() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let values = vec![0.0, 0.1, 0.2, 0.2, 0.2, 0.2, 0.3, 0.4, 0.4, 0.5];
        let s = TimeSeries::new(times, values, "synthetic", vec![]).unwrap();
        let p = detect_plateaus(&s, PLATEAU_TOL, 3);
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].t_start, p[0].t_end, p[0].points), (2.0, 5.0, 4));
    }

    #[test]
    fn z_norms() {
        for n in 1..=8 {
            for &t in &[0.0, 0.4, 1.9, 5.5] {
                let want = 2f64.powi(2 * n as i32 - 1);
                let got = z_norm_sqr(n, 1.0, t).unwrap();
                assert!((got / want - 1.0).abs() < 1e-12, "N={n}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn dicke_matches_closed_form() {
        for n_aux in 1..=6 {
            for &t in &[0.0, 0.6, 2.3, 4.0] {
                let sim = dicke_growth(n_aux, HamiltonianParams::xy(1.0), t).unwrap();
                let cf = dicke_closed_form(n_aux, 1.0, t).unwrap();
                assert!(sim.fidelity(&cf).unwrap() > 1.0 - 1e-12, "n_aux={n_aux}, t={t}");
            }
        }
    }

    #[test]
    fn dicke_first_step_coefficients() {
        let s = dicke_closed_form(1, 1.0, 0.8).unwrap();
        let a = (2.0f64 / 3.0).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        // |ψ+>|00>: indices 0100 and 1000
        assert!((s.amplitude(0b0100) - C64::new(a, 0.0)).norm() < 1e-14);
        assert!((s.amplitude(0b1000) - C64::new(a, 0.0)).norm() < 1e-14);
        let z = z_state(1, 1.0, 0.8).unwrap();
        for k in 0..4 {
            assert!((s.amplitude(k) - z[k] * (1.0f64 / 6.0).sqrt()).norm() < 1e-14);
        }
    }

    #[test]
    fn dicke_at_zero_time() {
        let s = dicke_growth(3, HamiltonianParams::xy(1.0), 0.0).unwrap();
        let w0 = canon::w().tensor(&StateVector::basis(3, 0).unwrap()).unwrap();
        assert!(s.fidelity(&w0).unwrap() > 1.0 - 1e-14);
        assert!(ggm_full(&s).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(HamiltonianParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(Evolution::new(canon::w(), &[EvolutionLink::new(0, 3, HamiltonianParams::xy(1.0))]).is_err());
        assert!(Evolution::new(canon::w(), &[EvolutionLink::new(1, 1, HamiltonianParams::xy(1.0))]).is_err());
        assert!(dicke_growth(0, HamiltonianParams::xy(1.0), 0.0).is_err());
        assert!(dicke_growth(30, HamiltonianParams::xy(1.0), 0.0).is_err());
        assert!(time_grid(1.0, 0.0).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![1.0, 1.0], "x", vec![]).is_err());
    }
}
