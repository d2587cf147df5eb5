//! Merging unit states with two-qubit unitaries across unit cells.
//!
//! A merge tensors the units together and applies `u_d(p)` on linked qubit
//! pairs. The optimizer searches `p ∈ [0, π/2]³` for maximal GGM; cut spectra
//! that no link separates are invariant, which gives an exact upper bound
//! and lets the objective skip those cuts.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon;
use crate::error::{Error, Result};
use crate::ggm::{self, GgmEngine};
use crate::optim::{self, Bounds, NelderMeadConfig};
use crate::qstate::{apply_two_qubit_in_place, StateVector, C64};
use crate::rng::{stream, TaskRng};
use crate::table::CsvTable;
use crate::unitary::{u_d, UnitaryParams};

/// Default S_U membership tolerance on GGM.
pub const S_U_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Linear,
    Triangle,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub params: UnitaryParams,
}

/// Unit sizes and the links joining them, in global qubit indexing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergePlan {
    pub unit_sizes: Vec<usize>,
    pub links: Vec<Link>,
    pub geometry: Geometry,
}

impl MergePlan {
    pub fn new(unit_sizes: Vec<usize>, links: Vec<Link>, geometry: Geometry) -> Result<Self> {
        let plan = Self { unit_sizes, links, geometry };
        plan.validate()?;
        Ok(plan)
    }

    /// Unit `k`'s last qubit linked to unit `k+1`'s first qubit.
    pub fn linear(unit_sizes: &[usize], params: &[UnitaryParams]) -> Result<Self> {
        if unit_sizes.len() < 2 || params.len() + 1 != unit_sizes.len() {
            return Err(Error::InvalidArgument(format!(
                "linear plan needs m >= 2 units and m-1 parameter sets, got {} and {}",
                unit_sizes.len(),
                params.len()
            )));
        }
        let mut offset = 0;
        let mut links = Vec::with_capacity(params.len());
        for (size, p) in unit_sizes.iter().zip(params) {
            offset += size;
            links.push(Link { a: offset - 1, b: offset, params: *p });
        }
        Self::new(unit_sizes.to_vec(), links, Geometry::Linear)
    }

    /// Three 3-qubit units joined cyclically on [`TRIANGLE_LINKS`].
    pub fn triangle(params: [UnitaryParams; 3]) -> Self {
        let links = TRIANGLE_LINKS
            .iter()
            .zip(params)
            .map(|(&(a, b), params)| Link { a, b, params })
            .collect();
        Self { unit_sizes: vec![3; 3], links, geometry: Geometry::Triangle }
    }

    pub fn total_qubits(&self) -> usize {
        self.unit_sizes.iter().sum()
    }

    pub fn unit_of(&self, qubit: usize) -> Option<usize> {
        let mut end = 0;
        for (k, size) in self.unit_sizes.iter().enumerate() {
            end += size;
            if qubit < end {
                return Some(k);
            }
        }
        None
    }

    fn validate(&self) -> Result<()> {
        if self.unit_sizes.contains(&0) {
            return Err(Error::InvalidArgument("unit cells need at least one qubit".into()));
        }
        let n = self.total_qubits();
        crate::qstate::check_cap(n)?;
        for l in &self.links {
            for q in [l.a, l.b] {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, num_qubits: n });
                }
            }
            if self.unit_of(l.a) == self.unit_of(l.b) {
                return Err(Error::InvalidArgument(format!(
                    "link ({}, {}) does not join two different units",
                    l.a, l.b
                )));
            }
        }
        if self.geometry == Geometry::Linear && self.links.len() + 1 != self.unit_sizes.len() {
            return Err(Error::InvalidArgument("linear plans need exactly m-1 links".into()));
        }
        Ok(())
    }

    /// Tensor the units in order and apply every link unitary in list order.
    pub fn apply(&self, units: &[StateVector]) -> Result<StateVector> {
        if units.len() != self.unit_sizes.len()
            || units.iter().zip(&self.unit_sizes).any(|(u, &s)| u.num_qubits() != s)
        {
            return Err(Error::InvalidArgument("unit states do not match the plan's unit sizes".into()));
        }
        let mut state = StateVector::tensor_all(units)?;
        for l in &self.links {
            state = state.apply_two_qubit(&u_d(l.params), l.a, l.b)?;
        }
        Ok(state)
    }
}

/// `u_d(p)` on `(qa, qb)` of `sA ⊗ sB`; `qb` is a global index into B's range.
pub fn merge_pair(a: &StateVector, b: &StateVector, qa: usize, qb: usize, p: UnitaryParams) -> Result<StateVector> {
    check_pair_link(a, b, qa, qb)?;
    a.tensor(b)?.apply_two_qubit(&u_d(p), qa, qb)
}

fn check_pair_link(a: &StateVector, b: &StateVector, qa: usize, qb: usize) -> Result<()> {
    let (na, n) = (a.num_qubits(), a.num_qubits() + b.num_qubits());
    if qa >= na {
        return Err(Error::IndexOutOfRange { index: qa, num_qubits: na });
    }
    if qb < na || qb >= n {
        return Err(Error::InvalidArgument(format!("qubit {qb} is not in the second unit ({na}..{n})")));
    }
    Ok(())
}

/// GGM of a fixed register after link unitaries, as a function of their parameters.
pub struct LinkObjective {
    base: Vec<C64>,
    n: usize,
    links: Vec<(usize, usize)>,
    moving: GgmEngine,
    fixed_lambda: f64,
}

impl LinkObjective {
    pub fn new(base: &StateVector, links: &[(usize, usize)]) -> Result<Self> {
        let n = base.num_qubits();
        for &(a, b) in links {
            for q in [a, b] {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, num_qubits: n });
                }
            }
            if a == b {
                return Err(Error::DuplicateQubit(a));
            }
        }
        let owned = links.to_vec();
        let separated = move |side: &[usize]| owned.iter().any(|&(a, b)| side.contains(&a) != side.contains(&b));
        let sep = separated.clone();
        let moving = GgmEngine::filtered(n, sep)?;
        let fixed = GgmEngine::filtered(n, move |s| !separated(s))?;
        let fixed_lambda = if fixed.num_cuts() == 0 { 0.0 } else { fixed.lambda_max(base.amplitudes()).0 };
        Ok(Self { base: base.amplitudes().to_vec(), n, links: links.to_vec(), moving, fixed_lambda })
    }

    /// Exact bound `1 - max λ` over cuts no link separates.
    pub fn upper_bound(&self) -> f64 {
        1.0 - self.fixed_lambda
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn state(&self, params: &[UnitaryParams]) -> Vec<C64> {
        debug_assert_eq!(params.len(), self.links.len());
        let mut amps = self.base.clone();
        for (&(a, b), p) in self.links.iter().zip(params) {
            apply_two_qubit_in_place(&mut amps, self.n, &u_d(*p), a, b);
        }
        amps
    }

    pub fn ggm(&self, params: &[UnitaryParams]) -> f64 {
        let amps = self.state(params);
        let moving = if self.moving.num_cuts() == 0 { 0.0 } else { self.moving.lambda_max(&amps).0 };
        (1.0 - moving.max(self.fixed_lambda)).max(0.0)
    }

    fn ggm_flat(&self, x: &[f64]) -> f64 {
        let params: Vec<UnitaryParams> =
            x.chunks_exact(3).map(|c| UnitaryParams::clamped([c[0], c[1], c[2]])).collect();
        self.ggm(&params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub nelder_mead: NelderMeadConfig,
    /// Stop restarting once the exact upper bound is reached.
    pub early_stop: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 24, nelder_mead: NelderMeadConfig::default(), early_stop: true }
    }
}

/// Reaching the bound within this counts as attaining it.
const BOUND_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub best_params: UnitaryParams,
    pub best_ggm: f64,
    pub restarts_used: usize,
    pub converged: bool,
    pub upper_bound: f64,
    pub evaluations: usize,
    /// GGM at each random start.
    pub start_ggms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkReport {
    pub best_params: Vec<UnitaryParams>,
    pub best_ggm: f64,
    pub restarts_used: usize,
    pub converged: bool,
    pub upper_bound: f64,
    pub evaluations: usize,
}

/// Maximize GGM over all link parameters jointly.
pub fn optimize_links(
    base: &StateVector,
    links: &[(usize, usize)],
    cfg: &OptimizerConfig,
    rng: &mut TaskRng,
) -> Result<NetworkReport> {
    let (params, run, bound) = run_optimizer(base, links, cfg, rng)?;
    Ok(NetworkReport {
        best_params: params,
        best_ggm: -run.best.fx,
        restarts_used: run.restarts_used,
        converged: run.best.converged || -run.best.fx >= bound - BOUND_TOL,
        upper_bound: bound,
        evaluations: run.total_evals,
    })
}

fn run_optimizer(
    base: &StateVector,
    links: &[(usize, usize)],
    cfg: &OptimizerConfig,
    rng: &mut TaskRng,
) -> Result<(Vec<UnitaryParams>, optim::MultiStart, f64)> {
    if links.is_empty() {
        return Err(Error::InvalidArgument("nothing to optimize without links".into()));
    }
    let objective = LinkObjective::new(base, links)?;
    let bound = objective.upper_bound();
    let bounds = Bounds::cube(3 * links.len(), 0.0, FRAC_PI_2)?;
    let stop_at = cfg.early_stop.then_some(-(bound - BOUND_TOL));
    let run = optim::multistart(|x| -objective.ggm_flat(x), &bounds, cfg.restarts, &cfg.nelder_mead, stop_at, rng)?;
    let params = run.best.x.chunks_exact(3).map(|c| UnitaryParams::clamped([c[0], c[1], c[2]])).collect();
    Ok((params, run, bound))
}

/// Search `[0, π/2]³` for the link parameters maximizing the merged GGM.
pub fn optimize_merge(
    a: &StateVector,
    b: &StateVector,
    qa: usize,
    qb: usize,
    cfg: &OptimizerConfig,
    rng: &mut TaskRng,
) -> Result<OptimizeReport> {
    check_pair_link(a, b, qa, qb)?;
    let base = a.tensor(b)?;
    let (params, run, bound) = run_optimizer(&base, &[(qa, qb)], cfg, rng)?;
    let best_ggm = -run.best.fx;
    Ok(OptimizeReport {
        best_params: params[0],
        best_ggm,
        restarts_used: run.restarts_used,
        converged: run.best.converged || best_ggm >= bound - BOUND_TOL,
        upper_bound: bound,
        evaluations: run.total_evals,
        start_ggms: run.start_values.iter().map(|v| -v).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropositionRecord {
    pub g1: f64,
    pub g2: f64,
    pub best_ggm: f64,
    /// `min(g1, g2) - best_ggm`.
    pub gap: f64,
    /// Both units have at least two qubits and nonzero GGM.
    pub in_hypothesis: bool,
    pub report: OptimizeReport,
}

/// Compare the optimized merge against `min(G1, G2)`.
pub fn proposition_check(
    a: &StateVector,
    b: &StateVector,
    qa: usize,
    qb: usize,
    cfg: &OptimizerConfig,
    rng: &mut TaskRng,
) -> Result<PropositionRecord> {
    let unit_ggm = |s: &StateVector| if s.num_qubits() < 2 { Ok(0.0) } else { ggm::ggm_full(s).map(|g| g.value) };
    let (g1, g2) = (unit_ggm(a)?, unit_ggm(b)?);
    let report = optimize_merge(a, b, qa, qb, cfg, rng)?;
    let in_hypothesis = a.num_qubits() >= 2 && b.num_qubits() >= 2 && g1 > 1e-12 && g2 > 1e-12;
    Ok(PropositionRecord { g1, g2, best_ggm: report.best_ggm, gap: g1.min(g2) - report.best_ggm, in_hypothesis, report })
}

/// `1 - max λ_max(ρ_q)` over qubits `q` outside `touched`.
pub fn untouched_marginal_bound(s: &StateVector, touched: &[usize]) -> Result<f64> {
    let mut top = 0.0f64;
    for q in (0..s.num_qubits()).filter(|q| !touched.contains(q)) {
        top = top.max(s.reduced_density(&[q])?.eigvals()?[0]);
    }
    Ok(1.0 - top)
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

fn add_into(acc: &mut [C64], v: &[C64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

/// Chain of `m` copies of a 3-qubit unit, built by the two-branch recursion
/// on the chain's last qubit.
///
/// With the unit written `A|0> + B|1>` on its last qubit and `|0>E + |1>F` on
/// its first, the chain is `X_{m-1} E + Y_{m-1} F` where
/// `X_1 = A U|00> + B U|10>`, `Y_1 = A U|01> + B U|11>` and each further step
/// attaches one unit. Equal to applying `u_d(params[k])` on `(3k+2, 3k+3)`.
pub fn chain_state(unit: &StateVector, m: usize, params: &[UnitaryParams]) -> Result<StateVector> {
    check_chain(unit, m, params)?;
    let a = unit.amplitudes();
    let half = |f: &dyn Fn(usize) -> usize| -> Vec<C64> { (0..4).map(|k| a[f(k)]).collect() };
    // A, B on qubits (0, 1); E, F on qubits (1, 2)
    let big_a = half(&|k| k << 1);
    let big_b = half(&|k| k << 1 | 1);
    let big_e = half(&|k| k);
    let big_f = half(&|k| 4 | k);
    // E_c, F_c: single-qubit slices with the unit's last qubit fixed to c
    let slice = |v: &[C64], c: usize| vec![v[c], v[2 | c]];
    let (e0, e1, f0, f1) = (slice(&big_e, 0), slice(&big_e, 1), slice(&big_f, 0), slice(&big_f, 1));

    let column = |u: &nalgebra::Matrix4<C64>, c: usize, d: usize| -> Vec<C64> {
        (0..4).map(|r| u[(r, 2 * c + d)]).collect()
    };
    let u = u_d(params[0]);
    let mut x = kron(&big_a, &column(&u, 0, 0));
    add_into(&mut x, &kron(&big_b, &column(&u, 1, 0)));
    let mut y = kron(&big_a, &column(&u, 0, 1));
    add_into(&mut y, &kron(&big_b, &column(&u, 1, 1)));
    for p in &params[1..] {
        let u = u_d(*p);
        let mut c0 = kron(&x, &e0);
        add_into(&mut c0, &kron(&y, &f0));
        let mut c1 = kron(&x, &e1);
        add_into(&mut c1, &kron(&y, &f1));
        let mut nx = kron(&c0, &column(&u, 0, 0));
        add_into(&mut nx, &kron(&c1, &column(&u, 1, 0)));
        let mut ny = kron(&c0, &column(&u, 0, 1));
        add_into(&mut ny, &kron(&c1, &column(&u, 1, 1)));
        (x, y) = (nx, ny);
    }
    let mut psi = kron(&x, &big_e);
    add_into(&mut psi, &kron(&y, &big_f));
    StateVector::from_amplitudes(psi)
}

/// Reference chain: tensor `m` copies, then apply each link unitary in turn.
pub fn chain_sequential(unit: &StateVector, m: usize, params: &[UnitaryParams]) -> Result<StateVector> {
    check_chain(unit, m, params)?;
    let units = vec![unit.clone(); m];
    MergePlan::linear(&vec![3; m], params)?.apply(&units)
}

fn check_chain(unit: &StateVector, m: usize, params: &[UnitaryParams]) -> Result<()> {
    if unit.num_qubits() != 3 {
        return Err(Error::InvalidArgument("chain units must have 3 qubits".into()));
    }
    if m < 2 || params.len() + 1 != m {
        return Err(Error::InvalidArgument(format!("chain of {m} units needs m >= 2 and m-1 parameter sets")));
    }
    crate::qstate::check_cap(3 * m)
}

/// Triangle links: unit A = (0,1,2), B = (3,4,5), C = (6,7,8); A–B, B–C, C–A.
pub const TRIANGLE_LINKS: [(usize, usize); 3] = [(2, 4), (5, 7), (8, 1)];
/// One qubit per unit that no link touches.
pub const TRIANGLE_UNTOUCHED: [usize; 3] = [0, 3, 6];
/// Linked qubits grouped by link pair: (C–A), (A–B), (B–C).
pub const TRIANGLE_XI_ORDER: [usize; 6] = [1, 8, 2, 4, 5, 7];

/// First growth step: three 3-qubit units joined cyclically.
pub fn triangle_step(units: &[StateVector; 3], params: [UnitaryParams; 3]) -> Result<StateVector> {
    if units.iter().any(|u| u.num_qubits() != 3) {
        return Err(Error::InvalidArgument("triangle units must have 3 qubits".into()));
    }
    MergePlan::triangle(params).apply(units)
}

/// Six-qubit basis pattern (linked qubits in [`TRIANGLE_XI_ORDER`], first
/// position most significant) paired with untouched bits `(a, b, c)` = prefix
/// `4a + 2b + c` for three GHZ units.
pub fn triangle_xi_patterns() -> [usize; 8] {
    const UNIT_A: usize = 0b101000;
    const UNIT_B: usize = 0b000110;
    const UNIT_C: usize = 0b010001;
    std::array::from_fn(|p| {
        let bit = |k: usize| (p >> k) & 1;
        (bit(2) * UNIT_A) ^ (bit(1) * UNIT_B) ^ (bit(0) * UNIT_C)
    })
}

/// Undo the link unitaries and split the state by the untouched qubits'
/// values. Entry `p` holds the 64 linked-qubit amplitudes (ordered as
/// [`TRIANGLE_XI_ORDER`]) for untouched bits `p`.
pub fn triangle_xi_components(state: &StateVector, params: [UnitaryParams; 3]) -> Result<[Vec<C64>; 8]> {
    if state.num_qubits() != 9 {
        return Err(Error::InvalidArgument("triangle states have 9 qubits".into()));
    }
    let mut amps = state.amplitudes().to_vec();
    for (&(a, b), p) in TRIANGLE_LINKS.iter().zip(params).rev() {
        apply_two_qubit_in_place(&mut amps, 9, &u_d(p).adjoint(), a, b);
    }
    let bit = |i: usize, q: usize| (i >> (8 - q)) & 1;
    let mut out: [Vec<C64>; 8] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); 64]);
    for (i, amp) in amps.into_iter().enumerate() {
        let prefix = TRIANGLE_UNTOUCHED.iter().fold(0, |acc, &q| acc << 1 | bit(i, q));
        let rest = TRIANGLE_XI_ORDER.iter().fold(0, |acc, &q| acc << 1 | bit(i, q));
        out[prefix][rest] = amp;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrianglePlan {
    pub step: u32,
    pub qubits: u64,
    /// Distinct unitary designs: three new ones per step.
    pub distinct_unitaries: u64,
    /// Total two-qubit gate applications.
    pub applications: u64,
}

/// Resource counts after `step` triangle growth steps starting from 3-qubit units.
pub fn triangle_plan(step: u32) -> Result<TrianglePlan> {
    if step == 0 || step > 30 {
        return Err(Error::InvalidArgument(format!("triangle step {step} outside 1..=30")));
    }
    let qubits = 3u64.pow(step + 1);
    Ok(TrianglePlan { step, qubits, distinct_unitaries: 3 * step as u64, applications: (qubits - 3) / 2 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub points_per_axis: usize,
    /// Grid coordinates shared by all three axes, endpoints included.
    pub axis: Vec<f64>,
    /// GGM at `(axis[i], axis[j], axis[k])`, stored at `(i * P + j) * P + k`.
    pub ggm: Vec<f64>,
    pub target: f64,
    pub tolerance: f64,
    pub s_u_mask: Vec<bool>,
    pub s_u_fraction: f64,
}

impl ScanResult {
    pub fn params_at(&self, index: usize) -> UnitaryParams {
        let p = self.points_per_axis;
        let (i, j, k) = (index / (p * p), index / p % p, index % p);
        UnitaryParams::clamped([self.axis[i], self.axis[j], self.axis[k]])
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&[
            ("alpha_x", "rad"),
            ("alpha_y", "rad"),
            ("alpha_z", "rad"),
            ("ggm", "1"),
            ("in_s_u", "bool"),
        ]);
        t.comment("points_per_axis", self.points_per_axis)
            .comment("target", self.target)
            .comment("s_u_tolerance", self.tolerance)
            .comment("s_u_fraction", self.s_u_fraction);
        for (idx, (g, m)) in self.ggm.iter().zip(&self.s_u_mask).enumerate() {
            let p = self.params_at(idx);
            t.push_row([p.alpha_x.to_string(), p.alpha_y.to_string(), p.alpha_z.to_string(), g.to_string(), (*m as u8).to_string()]);
        }
        t
    }
}

pub fn grid_axis(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| FRAC_PI_2 * i as f64 / (points - 1) as f64).collect(),
    }
}

/// GGM over a uniform grid of `[0, π/2]³`; S_U holds points within
/// `tolerance` of `min(G1, G2)`.
pub fn scan_unitary_space(
    a: &StateVector,
    b: &StateVector,
    qa: usize,
    qb: usize,
    points_per_axis: usize,
    tolerance: f64,
) -> Result<ScanResult> {
    check_pair_link(a, b, qa, qb)?;
    if points_per_axis < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 points per axis".into()));
    }
    let target = ggm::ggm_full(a)?.value.min(ggm::ggm_full(b)?.value);
    let objective = LinkObjective::new(&a.tensor(b)?, &[(qa, qb)])?;
    let axis = grid_axis(points_per_axis);
    let p = points_per_axis;
    let ggm: Vec<f64> = (0..p * p * p)
        .into_par_iter()
        .map(|idx| {
            let params = UnitaryParams::clamped([axis[idx / (p * p)], axis[idx / p % p], axis[idx % p]]);
            objective.ggm(&[params])
        })
        .collect();
    let s_u_mask: Vec<bool> = ggm.iter().map(|g| *g >= target - tolerance).collect();
    let s_u_fraction = s_u_mask.iter().filter(|m| **m).count() as f64 / s_u_mask.len() as f64;
    Ok(ScanResult { points_per_axis, axis, ggm, target, tolerance, s_u_mask, s_u_fraction })
}

/// Per grid point, how many of the pairs reach `min(G1, G2)` within `tolerance`.
pub fn universal_overlap(
    pairs: &[(StateVector, StateVector)],
    qa: usize,
    qb: usize,
    points_per_axis: usize,
    tolerance: f64,
) -> Result<Vec<u32>> {
    let mut counts = vec![0u32; points_per_axis.pow(3)];
    for (a, b) in pairs {
        let scan = scan_unitary_space(a, b, qa, qb, points_per_axis, tolerance)?;
        for (c, m) in counts.iter_mut().zip(&scan.s_u_mask) {
            *c += *m as u32;
        }
    }
    Ok(counts)
}

/// How the six qubits are split into two random unit states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Split {
    FiveOne,
    GhzGhz,
    FourTwo,
    GhzW,
    WW,
}

impl Split {
    pub const ALL: [Split; 5] = [Split::FiveOne, Split::GhzGhz, Split::FourTwo, Split::GhzW, Split::WW];

    pub fn label(self) -> &'static str {
        match self {
            Split::FiveOne => "(5,1)",
            Split::GhzGhz => "(3_GHZ,3_GHZ)",
            Split::FourTwo => "(4,2)",
            Split::GhzW => "(3_GHZ,3_W)",
            Split::WW => "(3_W,3_W)",
        }
    }

    pub fn sizes(self) -> (usize, usize) {
        match self {
            Split::FiveOne => (5, 1),
            Split::FourTwo => (4, 2),
            _ => (3, 3),
        }
    }

    fn index(self) -> u64 {
        Split::ALL.iter().position(|s| *s == self).expect("listed") as u64
    }

    /// Haar-random units, or W-class samples for the W slots.
    pub fn sample(self, rng: &mut TaskRng) -> Result<(StateVector, StateVector)> {
        Ok(match self {
            Split::FiveOne => (canon::haar_random(5, rng)?, canon::haar_random(1, rng)?),
            Split::GhzGhz => (canon::haar_random(3, rng)?, canon::haar_random(3, rng)?),
            Split::FourTwo => (canon::haar_random(4, rng)?, canon::haar_random(2, rng)?),
            Split::GhzW => (canon::haar_random(3, rng)?, canon::random_w_class(rng)),
            Split::WW => (canon::random_w_class(rng), canon::random_w_class(rng)),
        })
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match key.as_str() {
            "51" => Split::FiveOne,
            "3ghz3ghz" | "ghzghz" => Split::GhzGhz,
            "42" => Split::FourTwo,
            "3ghz3w" | "ghzw" => Split::GhzW,
            "3w3w" | "ww" => Split::WW,
            _ => return Err(Error::InvalidArgument(format!("unknown split `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    /// Fraction of samples per bin; sums to 1.
    pub frequencies: Vec<f64>,
}

impl Histogram {
    /// Equal-width bins over `[lo, hi]`; the last bin is closed.
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for v in values {
            let k = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            counts[k] += 1;
        }
        let total = values.len().max(1) as f64;
        Self {
            bin_edges: (0..=bins).map(|k| lo + width * k as f64).collect(),
            frequencies: counts.into_iter().map(|c| c as f64 / total).collect(),
        }
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&[("bin_left", "1"), ("bin_right", "1"), ("frequency", "1")]);
        for (k, f) in self.frequencies.iter().enumerate() {
            t.push_row([self.bin_edges[k], self.bin_edges[k + 1], *f]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceStats {
    pub split: Split,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
    pub histogram: Histogram,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Optimized merged GGM over random unit pairs of a split. Sample `i` draws
/// from stream `(seed, split * 2^32 + i)`, independent of thread count.
pub fn resource_distribution(
    split: Split,
    samples: usize,
    seed: u64,
    cfg: &OptimizerConfig,
    bins: usize,
) -> Result<ResourceStats> {
    if samples == 0 || bins == 0 {
        return Err(Error::InvalidArgument("resource distribution needs samples and bins".into()));
    }
    let (na, _) = split.sizes();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, split.index() << 32 | i as u64);
            let (a, b) = split.sample(&mut rng)?;
            Ok(optimize_merge(&a, &b, na - 1, na, cfg, &mut rng)?.best_ggm)
        })
        .collect::<Result<_>>()?;
    let (mean, std) = mean_std(&values);
    let histogram = Histogram::build(&values, 0.0, 0.5, bins);
    Ok(ResourceStats { split, samples, mean, std, values, histogram })
}
