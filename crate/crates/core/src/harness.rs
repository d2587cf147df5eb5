//! Experiment runner: layered configuration, seeding, and CSV/JSON output.
//!
//! A config is a flat JSON object; command-line values override file values.
//! Every CSV carries the seed, code version and effective parameters, and
//! reruns with the same seed write byte-identical files.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::canon;
use crate::disorder::{self, DisorderSpec, Family, Scheme, SweepConfig};
use crate::dynamics::{self, Evolution, EvolutionLink, HamiltonianParams};
use crate::ecp::{self, OptimizerConfig, Split};
use crate::error::{Error, Result};
use crate::ggm::{self, GgmEngine};
use crate::qstate::StateVector;
use crate::rng::{stream, TaskRng};
use crate::table::CsvTable;
use crate::unitary::{self, UnitaryParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reference Table I values, in [`Split::ALL`] order.
pub const TABLE1_REFERENCE_MEAN: [f64; 5] = [0.295, 0.122, 0.111, 0.056, 0.033];
pub const TABLE1_REFERENCE_STD: [f64; 5] = [0.041, 0.052, 0.076, 0.046, 0.032];
pub const TC_REFERENCE: (f64, f64, f64) = (33.2, 226.2, 52.2);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Ggm,
    Merge,
    Optimize,
    Scan,
    Table1,
    Chain,
    Triangle,
    Dynamics,
    Dicke,
    Disorder,
    TcFit,
    Suppression,
    Decompose,
    PropCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 14] = [
        Experiment::Ggm,
        Experiment::Merge,
        Experiment::Optimize,
        Experiment::Scan,
        Experiment::Table1,
        Experiment::Chain,
        Experiment::Triangle,
        Experiment::Dynamics,
        Experiment::Dicke,
        Experiment::Disorder,
        Experiment::TcFit,
        Experiment::Suppression,
        Experiment::Decompose,
        Experiment::PropCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ggm => "ggm",
            Experiment::Merge => "merge",
            Experiment::Optimize => "optimize",
            Experiment::Scan => "scan",
            Experiment::Table1 => "table1",
            Experiment::Chain => "chain",
            Experiment::Triangle => "triangle",
            Experiment::Dynamics => "dynamics",
            Experiment::Dicke => "dicke",
            Experiment::Disorder => "disorder",
            Experiment::TcFit => "tc-fit",
            Experiment::Suppression => "suppression",
            Experiment::Decompose => "decompose",
            Experiment::PropCheck => "prop-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// All run parameters. Keys mirror the command-line flags (`t_max` is `--t-max`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub out: PathBuf,

    /// State spec: ghz, w, wbar, g_ghz:θ, g_w:θ1:θ2, dicke:n:k, haar:n, zero:n.
    pub state: String,
    /// Two state specs separated by a comma; the default depends on the experiment.
    pub pair: Option<String>,
    /// `αx,αy,αz` in radians.
    pub params: Option<String>,
    /// Linked qubits `a,b` in composite indexing; default joins the pair's facing ends.
    pub link: Option<String>,
    pub max_cut: Option<usize>,

    pub grid: usize,
    pub tolerance: f64,
    pub samples: Option<usize>,
    pub bins: usize,
    pub restarts: usize,
    pub m: usize,
    pub step: u32,

    pub j: f64,
    pub gamma: f64,
    pub delta: f64,
    pub t_max: Option<f64>,
    pub dt: f64,
    pub t: f64,
    pub n_aux: usize,

    pub mean_j: f64,
    pub sigma_j: Option<f64>,
    /// Comma-separated σ_J list for sweeps.
    pub sigmas: String,
    /// trapezoid, gauss_hermite or monte_carlo.
    pub scheme: String,
    pub nodes: usize,
    pub spacing: f64,
    pub mc_samples: usize,
    pub window: f64,
    pub flatness_eps: f64,
    /// Sweep series end at `horizon / σ_J`.
    pub horizon: f64,
    pub sweep_dt: f64,
    pub family: String,
    pub thetas: usize,
    /// `(sigma_j, t_c)` CSV for tc-fit; the sweep is rerun when absent.
    pub input: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        Self {
            experiment: String::new(),
            seed: 1,
            threads: 0,
            out: PathBuf::from("out"),
            state: "w".into(),
            pair: None,
            params: None,
            link: None,
            max_cut: None,
            grid: 32,
            tolerance: ecp::S_U_TOL,
            samples: None,
            bins: 25,
            restarts: OptimizerConfig::default().restarts,
            m: 3,
            step: 5,
            j: 1.0,
            gamma: 0.0,
            delta: 0.0,
            t_max: None,
            dt: dynamics::DEFAULT_DT,
            t: 1.0,
            n_aux: 4,
            mean_j: 0.5,
            sigma_j: None,
            sigmas: "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1".into(),
            scheme: "trapezoid".into(),
            nodes: 64,
            spacing: 0.05,
            mc_samples: 10_000,
            window: sweep.window,
            flatness_eps: sweep.eps,
            horizon: sweep.horizon,
            sweep_dt: sweep.dt,
            family: "g_ghz".into(),
            thetas: 12,
            input: None,
        }
    }
}

impl ExperimentConfig {
    /// File values (if any) overlaid by `overrides`.
    pub fn from_layers(file: Option<&Path>, overrides: Map<String, Value>) -> Result<Self> {
        let mut merged = match file {
            Some(path) => match serde_json::from_str::<Value>(&std::fs::read_to_string(path)?)? {
                Value::Object(map) => map,
                _ => return Err(Error::InvalidConfig(format!("{} is not a JSON object", path.display()))),
            },
            None => Map::new(),
        };
        merged.extend(overrides);
        serde_json::from_value(Value::Object(merged)).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Parameters that determine the data (output location and thread count excluded).
    pub fn fingerprint(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(map) = &mut v {
            map.remove("out");
            map.remove("threads");
        }
        v
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig { restarts: self.restarts, ..OptimizerConfig::default() }
    }

    fn hamiltonian(&self) -> Result<HamiltonianParams> {
        HamiltonianParams::new(self.j, self.gamma, self.delta)
    }

    fn unit_params(&self) -> Result<Option<UnitaryParams>> {
        self.params.as_deref().map(str::parse).transpose()
    }

    fn sweep(&self) -> SweepConfig {
        SweepConfig { dt: self.sweep_dt, horizon: self.horizon, window: self.window, eps: self.flatness_eps }
    }

    fn scheme(&self) -> Result<Scheme> {
        match self.scheme.replace('-', "_").as_str() {
            "trapezoid" => Ok(Scheme::Trapezoid { spacing: self.spacing, half_width: 8.5 }),
            "gauss_hermite" | "gh" => Ok(Scheme::GaussHermite { nodes: self.nodes }),
            "monte_carlo" | "mc" => Ok(Scheme::MonteCarlo { samples: self.mc_samples, seed: self.seed }),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }

    fn sigma_list(&self) -> Result<Vec<f64>> {
        if let Some(s) = self.sigma_j {
            return Ok(vec![s]);
        }
        parse_list(&self.sigmas)
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidConfig(format!("bad number '{s}' in '{text}'"))))
        .collect()
}

/// Parse a state spec. `haar:n` draws from `rng`.
pub fn parse_state(spec: &str, rng: &mut TaskRng) -> Result<StateVector> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let num = |i: usize| -> Result<f64> {
        parts
            .get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidConfig(format!("state '{spec}' needs a numeric argument {i}")))
    };
    let count = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidConfig(format!("state '{spec}' needs an integer argument {i}")))
    };
    match parts[0].to_ascii_lowercase().as_str() {
        "ghz" => Ok(canon::ghz()),
        "w" => Ok(canon::w()),
        "wbar" => Ok(canon::wbar()),
        "g_ghz" | "gghz" => Ok(canon::g_ghz(num(1)?)),
        "g_w" | "gw" => Ok(canon::g_w(num(1)?, num(2)?)),
        "dicke" => canon::dicke(count(1)?, count(2)?),
        "haar" => canon::haar_random(count(1)?, rng),
        "zero" => StateVector::basis(count(1)?, 0),
        other => Err(Error::InvalidConfig(format!("unknown state '{other}'"))),
    }
}

fn parse_pair(spec: &str, rng: &mut TaskRng) -> Result<(StateVector, StateVector)> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| Error::InvalidConfig(format!("pair '{spec}' must be two comma-separated states")))?;
    Ok((parse_state(a, rng)?, parse_state(b, rng)?))
}

fn parse_link(cfg: &ExperimentConfig, na: usize) -> Result<(usize, usize)> {
    match &cfg.link {
        None => Ok((na - 1, na)),
        Some(text) => {
            let v = parse_list(text)?;
            if v.len() != 2 || v.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                return Err(Error::InvalidConfig(format!("link '{text}' must be two qubit indices")));
            }
            Ok((v[0] as usize, v[1] as usize))
        }
    }
}

/// Files written by one run plus its JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub files: Vec<PathBuf>,
    pub results: Value,
}

struct Output<'a> {
    cfg: &'a ExperimentConfig,
    exp: Experiment,
    files: Vec<PathBuf>,
}

impl Output<'_> {
    fn csv(&mut self, name: &str, mut table: CsvTable) -> Result<()> {
        table
            .comment("experiment", self.exp)
            .comment("seed", self.cfg.seed)
            .comment("version", VERSION)
            .comment("config", self.cfg.fingerprint());
        let path = self.cfg.out.join(name);
        table.save(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.cfg.out.join(name);
        std::fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn finish(mut self, results: Value) -> Result<RunSummary> {
        let path = self.cfg.out.join(format!("{}_summary.json", self.exp));
        self.files.push(path.clone());
        let doc = json!({
            "experiment": self.exp.name(),
            "seed": self.cfg.seed,
            "version": VERSION,
            "config": self.cfg.fingerprint(),
            "results": results,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(RunSummary { experiment: self.exp.name().into(), files: self.files, results })
    }
}

/// Run one experiment on a pool of `cfg.threads` workers.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let exp: Experiment = cfg.experiment.parse()?;
    std::fs::create_dir_all(&cfg.out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut out = Output { cfg, exp, files: Vec::new() };
        let mut rng = stream(cfg.seed, 0);
        let results = match exp {
            Experiment::Ggm => run_ggm(cfg, &mut rng, &mut out)?,
            Experiment::Merge => run_merge(cfg, &mut rng, &mut out)?,
            Experiment::Optimize => run_optimize(cfg, &mut rng, &mut out)?,
            Experiment::Scan => run_scan(cfg, &mut rng, &mut out)?,
            Experiment::Table1 => run_table1(cfg, &mut out)?,
            Experiment::Chain => run_chain(cfg, &mut rng, &mut out)?,
            Experiment::Triangle => run_triangle(cfg, &mut rng, &mut out)?,
            Experiment::Dynamics => run_dynamics(cfg, &mut rng, &mut out)?,
            Experiment::Dicke => run_dicke(cfg, &mut out)?,
            Experiment::Disorder => run_disorder(cfg, &mut rng, &mut out)?,
            Experiment::TcFit => run_tc_fit(cfg, &mut rng, &mut out)?,
            Experiment::Suppression => run_suppression(cfg, &mut out)?,
            Experiment::Decompose => run_decompose(cfg, &mut out)?,
            Experiment::PropCheck => run_prop_check(cfg, &mut out)?,
        };
        out.finish(results)
    })
}

fn default_params() -> UnitaryParams {
    UnitaryParams::new(0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4).expect("in range")
}

fn cut_label(side: &[usize]) -> String {
    side.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn pair_for(cfg: &ExperimentConfig, rng: &mut TaskRng, default: &str) -> Result<(StateVector, StateVector)> {
    parse_pair(cfg.pair.as_deref().unwrap_or(default), rng)
}

fn run_ggm(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let s = parse_state(&cfg.state, rng)?;
    let n = s.num_qubits();
    let engine = match cfg.max_cut {
        Some(k) => GgmEngine::restricted(n, k)?,
        None => GgmEngine::new(n)?,
    };
    let res = engine.evaluate(&s, true)?;
    let mut t = CsvTable::new(&[("cut", "qubits"), ("size", "1"), ("lambda_max", "1"), ("one_minus_lambda", "1")]);
    t.comment("state", &cfg.state);
    for (side, lambda) in res.per_cut.as_deref().unwrap_or_default() {
        t.push_row([cut_label(side), side.len().to_string(), lambda.to_string(), (1.0 - lambda).to_string()]);
    }
    out.csv("ggm_cuts.csv", t)?;
    Ok(json!({
        "state": cfg.state,
        "num_qubits": n,
        "cuts": engine.num_cuts(),
        "ggm": res.value,
        "lambda_max": res.lambda_max,
        "witness_cut": res.witness_cut,
    }))
}

fn run_merge(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let pair_spec = cfg.pair.as_deref().unwrap_or("ghz,ghz");
    let (a, b) = parse_pair(pair_spec, rng)?;
    let (qa, qb) = parse_link(cfg, a.num_qubits())?;
    let p = cfg.unit_params()?.unwrap_or_else(default_params);
    let merged = ecp::merge_pair(&a, &b, qa, qb, p)?;
    let res = ggm::ggm_full_with_cuts(&merged)?;
    let unit_ggm = |s: &StateVector| if s.num_qubits() < 2 { Ok(0.0) } else { ggm::ggm_full(s).map(|g| g.value) };
    let (g1, g2) = (unit_ggm(&a)?, unit_ggm(&b)?);
    let mut t = CsvTable::new(&[("cut", "qubits"), ("size", "1"), ("lambda_max", "1")]);
    t.comment("pair", pair_spec).comment("link", format!("{qa},{qb}")).comment("params", p);
    for (side, lambda) in res.per_cut.as_deref().unwrap_or_default() {
        t.push_row([cut_label(side), side.len().to_string(), lambda.to_string()]);
    }
    out.csv("merge_cuts.csv", t)?;
    let closed = (pair_spec.replace(' ', "").eq_ignore_ascii_case("ghz,ghz") && (qa, qb) == (2, 3))
        .then(|| crate::closedform::ghzghz_ggm(p));
    Ok(json!({
        "pair": pair_spec,
        "link": [qa, qb],
        "params": p,
        "g1": g1,
        "g2": g2,
        "min_g": g1.min(g2),
        "ggm": res.value,
        "witness_cut": res.witness_cut,
        "closed_form": closed,
    }))
}

fn run_optimize(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let (a, b) = pair_for(cfg, rng, "ghz,ghz")?;
    let (qa, qb) = parse_link(cfg, a.num_qubits())?;
    let rec = ecp::proposition_check(&a, &b, qa, qb, &cfg.optimizer(), rng)?;
    let mut t = CsvTable::new(&[("restart", "1"), ("start_ggm", "1")]);
    t.comment("best_ggm", rec.best_ggm).comment("upper_bound", rec.report.upper_bound);
    for (k, g) in rec.report.start_ggms.iter().enumerate() {
        t.push_row([k as f64, *g]);
    }
    out.csv("optimize_restarts.csv", t)?;
    Ok(json!({
        "g1": rec.g1,
        "g2": rec.g2,
        "min_g": rec.g1.min(rec.g2),
        "best_ggm": rec.best_ggm,
        "gap": rec.gap,
        "best_params": rec.report.best_params,
        "upper_bound": rec.report.upper_bound,
        "converged": rec.report.converged,
        "restarts_used": rec.report.restarts_used,
        "evaluations": rec.report.evaluations,
    }))
}

fn run_scan(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let (a, b) = pair_for(cfg, rng, "ghz,ghz")?;
    let (qa, qb) = parse_link(cfg, a.num_qubits())?;
    let scan = ecp::scan_unitary_space(&a, &b, qa, qb, cfg.grid, cfg.tolerance)?;
    out.csv("scan.csv", scan.to_csv())?;
    let (best_idx, best) = scan
        .ggm
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if *g > acc.1 { (i, *g) } else { acc });
    Ok(json!({
        "points_per_axis": scan.points_per_axis,
        "target": scan.target,
        "tolerance": scan.tolerance,
        "s_u_fraction": scan.s_u_fraction,
        "max_ggm": best,
        "argmax": scan.params_at(best_idx),
    }))
}

fn split_key(split: Split) -> &'static str {
    match split {
        Split::FiveOne => "5_1",
        Split::GhzGhz => "ghz_ghz",
        Split::FourTwo => "4_2",
        Split::GhzW => "ghz_w",
        Split::WW => "w_w",
    }
}

fn run_table1(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let samples = cfg.samples.unwrap_or(2000);
    let mut t = CsvTable::new(&[
        ("split", "label"),
        ("samples", "1"),
        ("mean", "1"),
        ("std", "1"),
        ("reference_mean", "1"),
        ("reference_std", "1"),
    ]);
    let mut rows = Vec::new();
    for (k, split) in Split::ALL.into_iter().enumerate() {
        let stats = ecp::resource_distribution(split, samples, cfg.seed, &cfg.optimizer(), cfg.bins)?;
        t.push_row([
            split_key(split).to_string(),
            samples.to_string(),
            stats.mean.to_string(),
            stats.std.to_string(),
            TABLE1_REFERENCE_MEAN[k].to_string(),
            TABLE1_REFERENCE_STD[k].to_string(),
        ]);
        let mut h = stats.histogram.to_csv();
        h.comment("split", split.label());
        out.csv(&format!("table1_hist_{}.csv", split_key(split)), h)?;
        rows.push(json!({
            "split": split.label(),
            "mean": stats.mean,
            "std": stats.std,
            "reference_mean": TABLE1_REFERENCE_MEAN[k],
            "reference_std": TABLE1_REFERENCE_STD[k],
        }));
    }
    out.csv("table1.csv", t)?;
    Ok(json!({ "samples": samples, "rows": rows }))
}

fn run_chain(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let unit = parse_state(&cfg.state, rng)?;
    let p = cfg.unit_params()?.unwrap_or_else(default_params);
    if cfg.m < 2 {
        return Err(Error::InvalidConfig("chain needs m >= 2".into()));
    }
    let mut t = CsvTable::new(&[("units", "1"), ("qubits", "1"), ("fidelity", "1"), ("ggm", "1")]);
    t.comment("state", &cfg.state).comment("params", p).comment("ggm_cap_qubits", 12);
    let mut rows = Vec::new();
    for m in 2..=cfg.m {
        let params = vec![p; m - 1];
        let fast = ecp::chain_state(&unit, m, &params)?;
        let fidelity = fast.fidelity(&ecp::chain_sequential(&unit, m, &params)?)?;
        let g = if 3 * m <= 12 { ggm::ggm_full(&fast)?.value } else { f64::NAN };
        t.push_row([m as f64, (3 * m) as f64, fidelity, g]);
        rows.push(json!({ "units": m, "fidelity": fidelity, "ggm": g.is_finite().then_some(g) }));
    }
    out.csv("chain.csv", t)?;
    Ok(json!({ "params": p, "rows": rows }))
}

fn run_triangle(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let unit = parse_state(if cfg.state == "w" { "ghz" } else { &cfg.state }, rng)?;
    // the default state is W for other experiments; triangles start from GHZ units
    let units = [unit.clone(), unit.clone(), unit];
    let base = StateVector::tensor_all(units.iter())?;
    let report = ecp::optimize_links(&base, &ecp::TRIANGLE_LINKS, &cfg.optimizer(), rng)?;
    let params: [UnitaryParams; 3] = std::array::from_fn(|k| report.best_params[k]);
    let state = ecp::triangle_step(&units, params)?;
    let xi = ecp::triangle_xi_components(&state, params)?;
    let patterns = ecp::triangle_xi_patterns();
    let mut t = CsvTable::new(&[("untouched_bits", "abc"), ("norm_sqr", "1"), ("pattern", "bits"), ("pattern_weight", "1")]);
    for (p, comp) in xi.iter().enumerate() {
        let norm: f64 = comp.iter().map(|a| a.norm_sqr()).sum();
        t.push_row([format!("{p:03b}"), norm.to_string(), format!("{:06b}", patterns[p]), comp[patterns[p]].norm_sqr().to_string()]);
    }
    out.csv("triangle_xi.csv", t)?;
    let mut plan = CsvTable::new(&[("step", "1"), ("qubits", "1"), ("distinct_unitaries", "1"), ("applications", "1")]);
    for step in 1..=cfg.step.max(1) {
        let tp = ecp::triangle_plan(step)?;
        plan.push_row([tp.step as u64, tp.qubits, tp.distinct_unitaries, tp.applications]);
    }
    out.csv("triangle_plan.csv", plan)?;
    Ok(json!({
        "best_ggm": report.best_ggm,
        "best_params": report.best_params,
        "upper_bound": report.upper_bound,
        "converged": report.converged,
        "restarts_used": report.restarts_used,
        "ggm_check": ggm::ggm_full(&state)?.value,
    }))
}

fn run_dynamics(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let (a, b) = pair_for(cfg, rng, "ghz,ghz")?;
    let (qa, qb) = parse_link(cfg, a.num_qubits())?;
    let hp = cfg.hamiltonian()?;
    let scale = if hp.j != 0.0 { hp.j.abs() } else { 1.0 };
    let t_max = cfg.t_max.unwrap_or(8.0 * PI / scale);
    let units = [a, b];
    let links = [EvolutionLink::new(qa, qb, hp)];
    let times = dynamics::time_grid(t_max, cfg.dt)?;
    let series = dynamics::ggm_timeseries(&units, &links, &times, "dynamics")?;
    out.csv("dynamics_series.csv", series.to_csv("ggm"))?;
    let plateaus = dynamics::detect_plateaus(&series, dynamics::PLATEAU_TOL, 5);
    let mut pt = CsvTable::new(&[("t_start", "1/J"), ("t_end", "1/J"), ("value", "1"), ("points", "1")]);
    pt.comment("tol", dynamics::PLATEAU_TOL);
    for p in &plateaus {
        pt.push_row([p.t_start, p.t_end, p.value, p.points as f64]);
    }
    out.csv("dynamics_plateaus.csv", pt)?;
    let evo = Evolution::from_units(&units, &links)?;
    let revival = evo.revival_period(t_max, cfg.dt)?;
    let probes: Vec<f64> = (0..16).map(|k| 0.37 + k as f64 * t_max / 37.0).collect();
    let period = dynamics::ggm_period(&evo, &probes, t_max / 2.0, cfg.dt, 1e-6)?;
    Ok(json!({
        "hamiltonian": hp,
        "link": [qa, qb],
        "points": series.len(),
        "max_ggm": series.max_value(),
        "plateaus": plateaus,
        "revival_period": revival,
        "ggm_period": period,
    }))
}

fn run_dicke(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let hp = HamiltonianParams::xy(cfg.j);
    let scale = if cfg.j != 0.0 { cfg.j.abs() } else { 1.0 };
    let times = dynamics::time_grid(cfg.t_max.unwrap_or(4.0 * PI / scale), cfg.dt)?;
    let n = cfg.n_aux + 3;
    let with_ggm = n <= 10;
    let rows: Vec<(f64, f64, f64)> = times
        .iter()
        .map(|&t| {
            let sim = dynamics::dicke_growth(cfg.n_aux, hp, t)?;
            let closed = dynamics::dicke_closed_form(cfg.n_aux, cfg.j, t)?;
            let g = if with_ggm { ggm::ggm_full(&sim)?.value } else { f64::NAN };
            Ok((t, sim.fidelity(&closed)?, g))
        })
        .collect::<Result<_>>()?;
    let mut t = CsvTable::new(&[("t", "1/J"), ("fidelity", "1"), ("ggm", "1")]);
    t.comment("n_aux", cfg.n_aux).comment("j", cfg.j);
    for r in &rows {
        t.push_row([r.0, r.1, r.2]);
    }
    out.csv("dicke_series.csv", t)?;
    let mut zt = CsvTable::new(&[("n", "1"), ("norm_sqr", "1"), ("expected", "1")]);
    zt.comment("t", cfg.t);
    let mut worst_norm = 0.0f64;
    for k in 1..=cfg.n_aux {
        let got = dynamics::z_norm_sqr(k, cfg.j, cfg.t)?;
        let want = 2f64.powi(2 * k as i32 - 1);
        worst_norm = worst_norm.max((got / want - 1.0).abs());
        zt.push_row([k as f64, got, want]);
    }
    out.csv("dicke_z_norms.csv", zt)?;
    let min_fidelity = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(json!({
        "n_aux": cfg.n_aux,
        "min_fidelity": min_fidelity,
        "max_ggm": with_ggm.then(|| rows.iter().map(|r| r.2).fold(0.0, f64::max)),
        "z_norm_max_rel_error": worst_norm,
    }))
}

fn sweep_inputs(cfg: &ExperimentConfig, rng: &mut TaskRng) -> Result<([StateVector; 2], [EvolutionLink; 1])> {
    let (a, b) = pair_for(cfg, rng, "w,w")?;
    let (qa, qb) = parse_link(cfg, a.num_qubits())?;
    let hp = HamiltonianParams::new(cfg.mean_j, cfg.gamma, cfg.delta)?;
    Ok(([a, b], [EvolutionLink::new(qa, qb, hp)]))
}

fn sigma_key(sigma: f64) -> String {
    format!("{sigma}").replace('.', "p")
}

fn run_disorder(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let (units, links) = sweep_inputs(cfg, rng)?;
    let sigmas = cfg.sigma_list()?;
    let sweep = cfg.sweep();
    let points = disorder::tc_sweep(&units, &links, cfg.mean_j, &sigmas, cfg.scheme()?, &sweep, "disorder")?;
    for p in &points {
        let mut t = p.series.to_csv("ggm_avg");
        t.comment("sigma_j", p.sigma).comment("scheme", &cfg.scheme);
        out.csv(&format!("disorder_sigma_{}.csv", sigma_key(p.sigma)), t)?;
    }
    out.csv("disorder_tc.csv", disorder::tc_table(&points, &sweep))?;
    Ok(json!({ "scheme": cfg.scheme()?, "points": points }))
}

/// `(sigma_j, t_c)` columns of a CSV, located by header name.
pub fn read_tc_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::InvalidConfig("empty t_c file".into()))?.split(',').map(str::trim).collect();
    let col = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| Error::InvalidConfig(format!("t_c file lacks column '{name}'")))
    };
    let (si, ti) = (col("sigma_j")?, col("t_c")?);
    let (mut sigmas, mut tcs) = (Vec::new(), Vec::new());
    for line in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |i: usize| {
            cells.get(i).and_then(|c| c.parse::<f64>().ok()).ok_or_else(|| Error::InvalidConfig(format!("bad row '{line}'")))
        };
        sigmas.push(get(si)?);
        tcs.push(get(ti)?);
    }
    Ok((sigmas, tcs))
}

fn run_tc_fit(cfg: &ExperimentConfig, rng: &mut TaskRng, out: &mut Output) -> Result<Value> {
    let (sigmas, tcs) = match &cfg.input {
        Some(path) => read_tc_csv(path)?,
        None => {
            let (units, links) = sweep_inputs(cfg, rng)?;
            let sweep = cfg.sweep();
            let points = disorder::tc_sweep(&units, &links, cfg.mean_j, &cfg.sigma_list()?, cfg.scheme()?, &sweep, "tc-fit")?;
            out.csv("tc_fit_data.csv", disorder::tc_table(&points, &sweep))?;
            (points.iter().map(|p| p.sigma).collect(), points.iter().map(|p| p.t_c).collect())
        }
    };
    let fit = disorder::fit_tc(&sigmas, &tcs)?;
    let mut t = CsvTable::new(&[("sigma_j", "J"), ("t_c", "1/J"), ("t_c_fit", "1/J"), ("t_c_reference", "1/J")]);
    t.comment("b", fit.b).comment("c", fit.c).comment("d", fit.d).comment("relative_residual", fit.relative_residual);
    let (rb, rc, rd) = TC_REFERENCE;
    for (s, tc) in sigmas.iter().zip(&tcs) {
        t.push_row([*s, *tc, fit.predict(*s), disorder::tc_model(rb, rc, rd, *s)]);
    }
    out.csv("tc_fit.csv", t)?;
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    Ok(json!({
        "fit": fit,
        "reference": { "b": rb, "c": rc, "d": rd },
        "relative_deviation": { "b": rel(fit.b, rb), "c": rel(fit.c, rc), "d": rel(fit.d, rd) },
    }))
}

fn run_suppression(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let family: Family = cfg.family.parse()?;
    let sigma = cfg.sigma_j.unwrap_or_else(|| family.default_sigma());
    let spec = DisorderSpec::new(cfg.mean_j, sigma, cfg.scheme()?)?;
    let p = cfg.thetas.max(1);
    let thetas: Vec<f64> = (1..=p).map(|k| FRAC_PI_2 * k as f64 / (p + 1) as f64).collect();
    let points = disorder::suppression_sweep(family, &thetas, &spec, &cfg.sweep())?;
    out.csv(&format!("suppression_{}.csv", family.label()), disorder::suppression_table(&points, family, &spec))?;
    let finite: Vec<f64> = points.iter().map(|p| p.ratio).filter(|r| r.is_finite()).collect();
    Ok(json!({
        "family": family.label(),
        "sigma_j": sigma,
        "points": points.iter().map(|p| json!({
            "theta": p.theta, "g_input": p.g_input, "g_s": p.g_s, "t_c": p.t_c,
            "ratio": p.ratio.is_finite().then_some(p.ratio),
        })).collect::<Vec<_>>(),
        "min_ratio": finite.iter().copied().fold(f64::INFINITY, f64::min),
        "max_ratio": finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }))
}

fn run_decompose(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let p = match cfg.unit_params()? {
        Some(p) => p,
        None => UnitaryParams::new(0.4, 0.6, 0.2)?,
    };
    let seq = unitary::decompose_u_d(p);
    let text = seq.to_text();
    out.text("decompose_circuit.txt", &format!("# params: {p}\n{text}"))?;
    let target = unitary::u_d(p);
    let fidelity = unitary::phase_fidelity(&target, &unitary::reconstruct(&seq)?);
    let parsed = unitary::GateSequence::from_text(&text)?;
    let exact = unitary::reconstruct(&parsed)?;
    let deviation = (exact - target).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(json!({
        "params": p,
        "cnots": seq.cnot_count(),
        "rotations": seq.rotation_count(),
        "phase_fidelity": fidelity,
        "round_trip_equal": parsed == seq,
        "max_entry_deviation": deviation,
    }))
}

fn run_prop_check(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    use rayon::prelude::*;
    let samples = cfg.samples.unwrap_or(200);
    let opt = cfg.optimizer();
    let records: Vec<(f64, f64, f64, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 1 << 40 | i as u64);
            let a = canon::haar_random(3, &mut rng)?;
            let b = canon::haar_random(3, &mut rng)?;
            let rec = ecp::proposition_check(&a, &b, 2, 3, &opt, &mut rng)?;
            let merged = ecp::merge_pair(&a, &b, 2, 3, rec.report.best_params)?;
            let bound = ecp::untouched_marginal_bound(&merged, &[2, 3])?;
            Ok((rec.g1, rec.g2, rec.best_ggm, rec.gap, bound))
        })
        .collect::<Result<_>>()?;
    let mut t = CsvTable::new(&[
        ("sample", "1"),
        ("g1", "1"),
        ("g2", "1"),
        ("best_ggm", "1"),
        ("gap", "1"),
        ("marginal_bound", "1"),
    ]);
    let mut violations = 0;
    let mut bound_violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut attained = 0;
    for (i, r) in records.iter().enumerate() {
        t.push_row([i as f64, r.0, r.1, r.2, r.3, r.4]);
        max_excess = max_excess.max(-r.3);
        violations += (r.3 < -1e-9) as usize;
        bound_violations += (r.2 > r.4 + 1e-9) as usize;
        attained += (r.3.abs() <= 1e-3) as usize;
    }
    out.csv("prop_check.csv", t)?;
    Ok(json!({
        "samples": samples,
        "min_bound_violations": violations,
        "marginal_bound_violations": bound_violations,
        "max_excess_over_min": max_excess,
        "attained_fraction": attained as f64 / samples.max(1) as f64,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(exp: &str, dir: &Path) -> ExperimentConfig {
        ExperimentConfig { experiment: exp.into(), out: dir.to_path_buf(), ..ExperimentConfig::default() }
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn layers_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.json");
        std::fs::write(&file, r#"{"experiment": "ggm", "seed": 5, "state": "ghz"}"#).unwrap();
        let mut over = Map::new();
        over.insert("seed".into(), json!(9));
        let c = ExperimentConfig::from_layers(Some(&file), over).unwrap();
        assert_eq!((c.seed, c.state.as_str(), c.grid), (9, "ghz", 32));
        std::fs::write(&file, r#"{"sed": 5}"#).unwrap();
        assert!(matches!(ExperimentConfig::from_layers(Some(&file), Map::new()), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn state_specs() {
        let mut rng = stream(1, 0);
        for (spec, n) in [("ghz", 3), ("w", 3), ("wbar", 3), ("g_ghz:0.3", 3), ("g_w:0.2:0.4", 3), ("dicke:4:2", 4), ("haar:5", 5), ("zero:2", 2)] {
            assert_eq!(parse_state(spec, &mut rng).unwrap().num_qubits(), n, "{spec}");
        }
        for bad in ["foo", "g_ghz", "dicke:4", "haar:x"] {
            assert!(parse_state(bad, &mut rng).is_err(), "{bad}");
        }
    }

    #[test]
    fn ggm_run_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg("ggm", dir.path());
        c.state = "ghz".into();
        let s = run(&c).unwrap();
        assert!((s.results["ggm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        let csv = std::fs::read_to_string(dir.path().join("ggm_cuts.csv")).unwrap();
        assert!(csv.starts_with("# schema: cut [qubits]"));
        assert!(csv.contains("# seed: 1") && csv.contains("# version: "));
        assert!(dir.path().join("ggm_summary.json").exists());
    }

    #[test]
    fn merge_matches_closed_form() {
        let dir = tempfile::tempdir().unwrap();
        let s = run(&cfg("merge", dir.path())).unwrap();
        let g = s.results["ggm"].as_f64().unwrap();
        assert!((g - 0.5).abs() < 1e-12);
        assert!((g - s.results["closed_form"].as_f64().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decompose_run() {
        let dir = tempfile::tempdir().unwrap();
        let s = run(&cfg("decompose", dir.path())).unwrap();
        assert_eq!(s.results["cnots"], 3);
        assert!(s.results["phase_fidelity"].as_f64().unwrap() > 1.0 - 1e-12);
        assert_eq!(s.results["round_trip_equal"], true);
    }

    #[test]
    fn tc_csv_reader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tc.csv");
        std::fs::write(&path, "# schema: x\n# a: b\nsigma_j,t_c,g_s\n0.1,30,0.2\n0.2,20,0.2\n").unwrap();
        assert_eq!(read_tc_csv(&path).unwrap(), (vec![0.1, 0.2], vec![30.0, 20.0]));
    }
}
