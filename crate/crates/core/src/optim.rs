//! Box-constrained Nelder–Mead with uniform random restarts.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NelderMeadConfig {
    /// Stop when the simplex function spread falls below this.
    pub ftol: f64,
    pub max_evals: usize,
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self { ftol: 1e-9, max_evals: 500, initial_step: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument("bounds need matching non-empty lower/upper".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidArgument("lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn cube(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*l, *u);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if l == u { *l } else { rng.random_range(*l..*u) })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`. Trial points are projected onto the box.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], bounds: &Bounds, cfg: &NelderMeadConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = bounds.dim();
    if x0.len() != n {
        return Err(Error::InvalidArgument(format!("start point has {} coordinates, box has {n}", x0.len())));
    }
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    bounds.clamp(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&start, &mut evals);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let side = bounds.upper[i] - bounds.lower[i];
        let step = if side > 0.0 { cfg.initial_step * side } else { 0.0 };
        let mut v = start.clone();
        // step inward when the start sits on the upper face
        v[i] = if v[i] + step <= bounds.upper[i] { v[i] + step } else { v[i] - step };
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    while evals < cfg.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() <= cfg.ftol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| {
            let mut p: Vec<f64> = centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect();
            bounds.clamp(&mut p);
            p
        };
        let worst = simplex[n].0.clone();
        let xr = along(alpha, &worst);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(gamma, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(rho, &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho, &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + sigma * (*x - b);
                    }
                    *fv = eval(v, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Ok(Minimum { x, fx, evals, converged })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiStart {
    pub best: Minimum,
    /// Function value at each random start, in draw order.
    pub start_values: Vec<f64>,
    pub restarts_used: usize,
    pub total_evals: usize,
}

/// Restarted minimization from uniform draws in the box. Starts are drawn up
/// front, so the result depends only on the rng state. Stops early once a
/// restart reaches `stop_at` (a known lower bound of `f`).
pub fn multistart<F, R>(
    mut f: F,
    bounds: &Bounds,
    restarts: usize,
    cfg: &NelderMeadConfig,
    stop_at: Option<f64>,
    rng: &mut R,
) -> Result<MultiStart>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let starts: Vec<Vec<f64>> = (0..restarts).map(|_| bounds.sample(rng)).collect();
    let mut best: Option<Minimum> = None;
    let mut start_values = Vec::with_capacity(restarts);
    let mut total_evals = 0;
    let mut used = 0;
    for x0 in &starts {
        used += 1;
        let m = nelder_mead(&mut f, x0, bounds, cfg)?;
        // first simplex vertex is the clamped start
        start_values.push(f(x0));
        total_evals += m.evals + 1;
        let done = stop_at.is_some_and(|t| m.fx <= t);
        if best.as_ref().is_none_or(|b| m.fx < b.fx) {
            best = Some(m);
        }
        if done {
            break;
        }
    }
    Ok(MultiStart { best: best.expect("at least one restart"), start_values, restarts_used: used, total_evals })
}
