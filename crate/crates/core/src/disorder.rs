//! Quenched disorder in the coupling `J ~ N(<J>, σ_J²)`: averaged GGM
//! series, saturation detection, `t_c` fits and suppression ratios.
//!
//! One `J` is drawn per realization and shared by every link; the other
//! Hamiltonian parameters come from each link's template.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon;
use crate::dynamics::{time_grid, EvolutionLink, Evolution, HamiltonianParams, TimeSeries};
use crate::error::{Error, Result};
use crate::ggm::ggm_full;
use crate::optim::{self, Bounds, NelderMeadConfig};
use crate::quadrature::NormalRule;
use crate::qstate::StateVector;
use crate::rng::stream;
use crate::table::CsvTable;

/// Default rolling-window width for saturation, in time units.
pub const SATURATION_WINDOW: f64 = 5.0;
/// Default flatness threshold (max - min inside a window).
pub const SATURATION_EPS: f64 = 1e-3;
/// Reference offset in the `t_c` model `b + c exp[-d (σ - 0.01)]`.
pub const SIGMA_REF: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    GaussHermite { nodes: usize },
    /// Equal-spaced nodes in the standardized variable with Gaussian weights.
    Trapezoid { spacing: f64, half_width: f64 },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::Trapezoid { spacing: 0.05, half_width: 8.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub mean_j: f64,
    pub sigma_j: f64,
    pub scheme: Scheme,
}

impl DisorderSpec {
    pub fn new(mean_j: f64, sigma_j: f64, scheme: Scheme) -> Result<Self> {
        if !mean_j.is_finite() || !(sigma_j >= 0.0 && sigma_j.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad disorder <J>={mean_j}, sigma={sigma_j}")));
        }
        match scheme {
            Scheme::GaussHermite { nodes } if nodes < 2 => {
                return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {nodes}")))
            }
            Scheme::MonteCarlo { samples, .. } if samples < 2 => {
                return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")))
            }
            _ => {}
        }
        Ok(Self { mean_j, sigma_j, scheme })
    }

    /// Coupling values and weights, in a fixed order.
    pub fn realizations(&self) -> Result<Vec<(f64, f64)>> {
        let spread = |rule: NormalRule| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(z, w)| (self.mean_j + self.sigma_j * z, *w))
                .collect()
        };
        Ok(match self.scheme {
            Scheme::GaussHermite { nodes } => spread(NormalRule::gauss_hermite(nodes)?),
            Scheme::Trapezoid { spacing, half_width } => spread(NormalRule::trapezoid(spacing, half_width)?),
            Scheme::MonteCarlo { samples, seed } => {
                if samples < 2 {
                    return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
                }
                let w = 1.0 / samples as f64;
                (0..samples)
                    .map(|s| {
                        let z: f64 = StandardNormal.sample(&mut stream(seed, s as u64));
                        (self.mean_j + self.sigma_j * z, w)
                    })
                    .collect()
            }
        })
    }
}

/// `<G>(t)` averaged over `J`. With `σ_J = 0` this is the ordered series.
pub fn quench_avg_ggm(
    units: &[StateVector],
    links: &[EvolutionLink],
    spec: &DisorderSpec,
    times: &[f64],
    tag: &str,
) -> Result<TimeSeries> {
    let initial = StateVector::tensor_all(units)?;
    let hp: Vec<HamiltonianParams> = links.iter().map(|l| l.hp.with_j(spec.mean_j)).collect();
    let with_j = |j: f64| -> Vec<EvolutionLink> { links.iter().map(|l| EvolutionLink { hp: l.hp.with_j(j), ..*l }).collect() };
    let realizations = if spec.sigma_j == 0.0 { vec![(spec.mean_j, 1.0)] } else { spec.realizations()? };
    let eval = Evolution::new(initial.clone(), &with_j(spec.mean_j))?.ggm_evaluator()?;
    let per_j: Vec<Vec<f64>> = realizations
        .par_iter()
        .map(|&(j, _)| -> Result<Vec<f64>> {
            let evo = Evolution::new(initial.clone(), &with_j(j))?;
            Ok(times.iter().map(|&t| evo.ggm_at(&eval, t)).collect())
        })
        .collect::<Result<_>>()?;
    let mut avg = vec![0.0; times.len()];
    for ((_, w), series) in realizations.iter().zip(&per_j) {
        for (a, g) in avg.iter_mut().zip(series) {
            *a += w * g;
        }
    }
    TimeSeries::new(times.to_vec(), avg, tag, hp)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationResult {
    pub t_c: f64,
    pub g_s: f64,
    pub window: f64,
    pub eps: f64,
    pub tail_points: usize,
}

/// `t_c` is the first time after which every window of width `window`
/// (starting at a grid point and fitting in the series) has spread below
/// `eps`; `g_s` is the mean from `t_c` on.
pub fn saturation(series: &TimeSeries, window: f64, eps: f64) -> Result<SaturationResult> {
    if !(window > 0.0 && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("bad saturation window={window}, eps={eps}")));
    }
    let (t, v) = (&series.times, &series.values);
    let none = Error::NoSaturation { window, eps };
    let last = *t.last().ok_or(Error::NoSaturation { window, eps })?;
    let slack = 1e-9 * window;
    let starts = t.iter().take_while(|&&s| s + window <= last + slack).count();
    if starts == 0 {
        return Err(none);
    }
    let mut end = 0;
    let mut flat = Vec::with_capacity(starts);
    for k in 0..starts {
        while end + 1 < t.len() && t[end + 1] <= t[k] + window + slack {
            end += 1;
        }
        let w = &v[k..=end];
        let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        flat.push(hi - lo < eps);
    }
    if !flat[starts - 1] {
        return Err(none);
    }
    let first = flat.iter().rposition(|f| !f).map_or(0, |k| k + 1);
    let tail = &v[first..];
    Ok(SaturationResult {
        t_c: t[first],
        g_s: tail.iter().sum::<f64>() / tail.len() as f64,
        window,
        eps,
        tail_points: tail.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Sum of squared residuals.
    pub residual: f64,
    /// `||residuals|| / ||t_c||`.
    pub relative_residual: f64,
    pub evaluations: usize,
}

impl FitResult {
    pub fn predict(&self, sigma: f64) -> f64 {
        tc_model(self.b, self.c, self.d, sigma)
    }
}

pub fn tc_model(b: f64, c: f64, d: f64, sigma: f64) -> f64 {
    b + c * (-d * (sigma - SIGMA_REF)).exp()
}

/// Least-squares fit of `b + c exp[-d (σ - 0.01)]` with 16 random restarts.
pub fn fit_tc(sigmas: &[f64], t_cs: &[f64]) -> Result<FitResult> {
    fit_tc_with(sigmas, t_cs, 16, 0)
}

pub fn fit_tc_with(sigmas: &[f64], t_cs: &[f64], restarts: usize, seed: u64) -> Result<FitResult> {
    if sigmas.len() != t_cs.len() || sigmas.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 paired points, got {} and {}", sigmas.len(), t_cs.len())));
    }
    if sigmas.iter().chain(t_cs).any(|x| !x.is_finite()) {
        return Err(Error::DegenerateFit("non-finite data".into()));
    }
    let mut order: Vec<usize> = (0..sigmas.len()).collect();
    order.sort_by(|&a, &b| sigmas[a].total_cmp(&sigmas[b]));
    let (sx, ty): (Vec<f64>, Vec<f64>) = order.iter().map(|&k| (sigmas[k], t_cs[k])).unzip();
    let range = sx[sx.len() - 1] - sx[0];
    if range <= 0.0 {
        return Err(Error::DegenerateFit("all sigma values coincide".into()));
    }
    // work in units where t_c and the sigma range are O(1)
    let scale = ty.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let rss = |b: f64, c: f64, d: f64| -> f64 {
        sx.iter().zip(&ty).map(|(s, t)| (tc_model(b, c, d, *s) - t).powi(2)).sum()
    };
    let objective = |x: &[f64]| rss(x[0] * scale, x[1] * scale, x[2] / range) / (scale * scale);

    let tail = (ty.len() / 4).max(1);
    let b0 = ty[ty.len() - tail..].iter().sum::<f64>() / tail as f64;
    let c0 = ty[0] - b0;
    let x0 = [b0 / scale, c0 / scale, 1.0];
    let bounds = Bounds::new(vec![-2.0, -60.0, 0.0], vec![2.0, 60.0, 60.0])?;
    let cfg = NelderMeadConfig { ftol: 1e-16, max_evals: 4000, initial_step: 0.05 };

    let mut best = optim::nelder_mead(objective, &x0, &bounds, &cfg)?;
    let mut evals = best.evals;
    if restarts > 0 {
        let ms = optim::multistart(objective, &bounds, restarts, &cfg, None, &mut stream(seed, 0))?;
        evals += ms.total_evals;
        if ms.best.fx < best.fx {
            best = ms.best;
        }
    }
    let polish = NelderMeadConfig { initial_step: 0.005, ..cfg };
    let refined = optim::nelder_mead(objective, &best.x, &bounds, &polish)?;
    evals += refined.evals;
    if refined.fx <= best.fx {
        best = refined;
    }
    let (b, c, d) = (best.x[0] * scale, best.x[1] * scale, best.x[2] / range);
    let residual = rss(b, c, d);
    let norm = ty.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(FitResult {
        b,
        c,
        d,
        residual,
        relative_residual: if norm > 0.0 { residual.sqrt() / norm } else { residual.sqrt() },
        evaluations: evals,
    })
}

/// Time grid and saturation settings for sweeps. Each series runs to
/// `horizon / σ_J`, where the averaged oscillation has died out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dt: f64,
    pub horizon: f64,
    pub window: f64,
    pub eps: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { dt: 0.1, horizon: 5.0, window: SATURATION_WINDOW, eps: SATURATION_EPS }
    }
}

impl SweepConfig {
    pub fn times_for(&self, sigma: f64) -> Result<Vec<f64>> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("saturation sweeps need sigma > 0, got {sigma}")));
        }
        time_grid((self.horizon / sigma).max(3.0 * self.window), self.dt)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TcPoint {
    pub sigma: f64,
    pub t_c: f64,
    pub g_s: f64,
    #[serde(skip)]
    pub series: TimeSeries,
}

/// Averaged series and saturation for each `σ_J`.
pub fn tc_sweep(
    units: &[StateVector],
    links: &[EvolutionLink],
    mean_j: f64,
    sigmas: &[f64],
    scheme: Scheme,
    cfg: &SweepConfig,
    tag: &str,
) -> Result<Vec<TcPoint>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let spec = DisorderSpec::new(mean_j, sigma, scheme)?;
            let series = quench_avg_ggm(units, links, &spec, &cfg.times_for(sigma)?, tag)?;
            let sat = saturation(&series, cfg.window, cfg.eps)?;
            Ok(TcPoint { sigma, t_c: sat.t_c, g_s: sat.g_s, series })
        })
        .collect()
}

pub fn tc_table(points: &[TcPoint], cfg: &SweepConfig) -> CsvTable {
    let mut t = CsvTable::new(&[("sigma_j", "J"), ("t_c", "1/J"), ("g_s", "1")]);
    t.comment("window", cfg.window).comment("flatness_eps", cfg.eps).comment("dt", cfg.dt);
    for p in points {
        t.push_row([p.sigma, p.t_c, p.g_s]);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GGhz,
    GW,
}

impl Family {
    /// The unit for angle `θ` (`θ1 = θ2 = θ` for the W family).
    pub fn unit(self, theta: f64) -> StateVector {
        match self {
            Family::GGhz => canon::g_ghz(theta),
            Family::GW => canon::g_w(theta, theta),
        }
    }

    /// Disorder strength used for this family's suppression curve.
    pub fn default_sigma(self) -> f64 {
        match self {
            Family::GGhz => 0.1,
            Family::GW => 0.3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::GGhz => "g_ghz",
            Family::GW => "g_w",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "g_ghz" | "gghz" => Ok(Family::GGhz),
            "g_w" | "gw" => Ok(Family::GW),
            other => Err(Error::InvalidArgument(format!("unknown state family '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuppressionPoint {
    pub theta: f64,
    pub g_input: f64,
    pub g_s: f64,
    pub t_c: f64,
    /// `g_s / g_input`; NaN when the input is not entangled.
    pub ratio: f64,
}

/// Two copies of the family unit joined on `(2, 3)` by an XY link.
pub fn suppression_sweep(
    family: Family,
    thetas: &[f64],
    spec: &DisorderSpec,
    cfg: &SweepConfig,
) -> Result<Vec<SuppressionPoint>> {
    let link = [EvolutionLink::new(2, 3, HamiltonianParams::xy(spec.mean_j))];
    let times = cfg.times_for(spec.sigma_j)?;
    thetas
        .iter()
        .map(|&theta| {
            let unit = family.unit(theta);
            let g_input = ggm_full(&unit)?.value;
            let series = quench_avg_ggm(&[unit.clone(), unit], &link, spec, &times, family.label())?;
            let sat = saturation(&series, cfg.window, cfg.eps)?;
            let ratio = if g_input > 1e-12 { sat.g_s / g_input } else { f64::NAN };
            Ok(SuppressionPoint { theta, g_input, g_s: sat.g_s, t_c: sat.t_c, ratio })
        })
        .collect()
}

pub fn suppression_table(points: &[SuppressionPoint], family: Family, spec: &DisorderSpec) -> CsvTable {
    let mut t = CsvTable::new(&[("theta", "rad"), ("ratio", "1"), ("g_input", "1"), ("g_s", "1"), ("t_c", "1/J")]);
    t.comment("family", family.label()).comment("mean_j", spec.mean_j).comment("sigma_j", spec.sigma_j);
    for p in points {
        t.push_row([p.theta, p.ratio, p.g_input, p.g_s, p.t_c]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ggm_timeseries;

    fn ww_link() -> [EvolutionLink; 1] {
        [EvolutionLink::new(2, 3, HamiltonianParams::xy(0.5))]
    }

    #[test]
    fn zero_sigma_is_ordered_series() {
        let times = time_grid(30.0, 0.25).unwrap();
        let units = [canon::w(), canon::w()];
        let ordered = ggm_timeseries(&units, &ww_link(), &times, "W⊗W").unwrap();
        for scheme in [Scheme::default(), Scheme::GaussHermite { nodes: 64 }, Scheme::MonteCarlo { samples: 10, seed: 1 }] {
            let spec = DisorderSpec::new(0.5, 0.0, scheme).unwrap();
            let avg = quench_avg_ggm(&units, &ww_link(), &spec, &times, "W⊗W").unwrap();
            for (a, b) in avg.values.iter().zip(&ordered.values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn average_stays_in_range_and_flattens() {
        let spec = DisorderSpec::new(0.5, 0.1, Scheme::default()).unwrap();
        let times = time_grid(60.0, 0.1).unwrap();
        let s = quench_avg_ggm(&[canon::w(), canon::w()], &ww_link(), &spec, &times, "W⊗W").unwrap();
        assert!(s.values.iter().all(|v| (0.0..=0.5).contains(v)));
        let sat = saturation(&s, SATURATION_WINDOW, SATURATION_EPS).unwrap();
        assert!(sat.t_c > 10.0 && sat.t_c < 50.0, "{sat:?}");
    }

    #[test]
    fn product_units_average_to_zero() {
        let zero = StateVector::basis(3, 0).unwrap();
        let spec = DisorderSpec::new(0.5, 0.2, Scheme::GaussHermite { nodes: 16 }).unwrap();
        let times = time_grid(5.0, 0.5).unwrap();
        let s = quench_avg_ggm(&[zero.clone(), zero], &ww_link(), &spec, &times, "0").unwrap();
        assert!(s.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn saturation_on_synthetic_series() {
        let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| if *t < 12.0 { 0.2 + 0.05 * (3.0 * t).sin() } else { 0.2 }).collect();
        let s = TimeSeries::new(times.clone(), values, "synthetic", vec![]).unwrap();
        let sat = saturation(&s, 5.0, 1e-3).unwrap();
        assert!(sat.t_c > 11.0 && sat.t_c <= 12.0 + 1e-9, "{sat:?}");
        assert!((sat.g_s - 0.2).abs() < 1e-3);
        let flat = TimeSeries::new(times.clone(), vec![0.3; times.len()], "flat", vec![]).unwrap();
        let sat = saturation(&flat, 5.0, 1e-3).unwrap();
        assert_eq!(sat.t_c, 0.0);
        assert_eq!(sat.tail_points, times.len());
        let wavy = TimeSeries::new(times.clone(), times.iter().map(|t| t.sin()).collect(), "wavy", vec![]).unwrap();
        assert!(matches!(saturation(&wavy, 5.0, 1e-3), Err(Error::NoSaturation { .. })));
    }

    #[test]
    fn fit_recovers_synthetic_parameters() {
        let sigmas: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64).collect();
        let clean: Vec<f64> = sigmas.iter().map(|s| tc_model(33.2, 226.2, 52.2, *s)).collect();
        let fit = fit_tc(&sigmas, &clean).unwrap();
        assert!((fit.b - 33.2).abs() < 1e-3 && (fit.c - 226.2).abs() < 1e-3 && (fit.d - 52.2).abs() < 1e-3, "{fit:?}");
        let noisy: Vec<f64> = clean.iter().enumerate().map(|(k, v)| v * (1.0 + 0.01 * ((k * 7 % 5) as f64 - 2.0) / 2.0)).collect();
        let fit = fit_tc(&sigmas, &noisy).unwrap();
        for (got, want) in [(fit.b, 33.2), (fit.c, 226.2), (fit.d, 52.2)] {
            assert!((got / want - 1.0).abs() < 0.05, "{fit:?}");
        }
    }

    #[test]
    fn fit_constant_data() {
        let sigmas = [0.01, 0.02, 0.03, 0.05, 0.08];
        let fit = fit_tc(&sigmas, &[40.0; 5]).unwrap();
        for s in sigmas {
            assert!((fit.predict(s) - 40.0).abs() < 1e-4);
        }
    }

    #[test]
    fn fit_rejects_degenerate_designs() {
        assert!(matches!(fit_tc(&[0.1, 0.2, 0.3], &[1.0, 2.0, 3.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_tc(&[0.1; 4], &[1.0, 2.0, 3.0, 4.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_tc(&[0.1, 0.2, 0.3, f64::NAN], &[1.0; 4]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn spec_validation_and_realizations() {
        assert!(DisorderSpec::new(0.5, -0.1, Scheme::default()).is_err());
        assert!(DisorderSpec::new(0.5, 0.1, Scheme::GaussHermite { nodes: 1 }).is_err());
        assert!(DisorderSpec::new(0.5, 0.1, Scheme::MonteCarlo { samples: 1, seed: 0 }).is_err());
        let mc = DisorderSpec::new(0.5, 0.1, Scheme::MonteCarlo { samples: 20000, seed: 3 }).unwrap();
        let r = mc.realizations().unwrap();
        assert_eq!(r, mc.realizations().unwrap());
        let mean = r.iter().map(|p| p.0 * p.1).sum::<f64>();
        let var = r.iter().map(|p| (p.0 - mean).powi(2) * p.1).sum::<f64>();
        assert!((mean - 0.5).abs() < 3e-3 && (var.sqrt() - 0.1).abs() < 3e-3);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("g_ghz".parse::<Family>().unwrap(), Family::GGhz);
        assert_eq!("gW".parse::<Family>().unwrap(), Family::GW);
        assert!("ghz".parse::<Family>().is_err());
    }
}
