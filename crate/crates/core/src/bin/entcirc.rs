use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use entcirc::harness::{run, ExperimentConfig};

#[derive(Parser)]
#[command(name = "entcirc", version, about = "Entanglement circulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// GGM of one state, with every cut's top eigenvalue
    Ggm(Flags),
    /// Merge two units with a fixed link unitary
    Merge(Flags),
    /// Optimize the link unitary for one pair
    Optimize(Flags),
    /// Grid scan of the link parameter cube
    Scan(Flags),
    /// Optimized-merge statistics over random pairs, per split
    Table1(Flags),
    /// Linear chain: fast recursion vs sequential merge
    Chain(Flags),
    /// Triangle growth step, with resource counts
    Triangle(Flags),
    /// GGM under XYZ evolution of a link
    Dynamics(Flags),
    /// Auxiliary-qubit growth vs its closed form
    Dicke(Flags),
    /// Quench-averaged GGM and saturation per sigma_J
    Disorder(Flags),
    /// Fit t_c(sigma_J) to b + c exp(-d sigma_J)
    TcFit(Flags),
    /// Saturated-to-input GGM ratio along a state family
    Suppression(Flags),
    /// CNOT circuit for the link unitary
    Decompose(Flags),
    /// Merged GGM vs min(G1, G2) over random pairs
    PropCheck(Flags),
}

/// Every flag is optional; unset flags fall back to the config file, then defaults.
#[derive(Args, Serialize, Default)]
struct Flags {
    /// JSON config with flat keys
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    /// ghz, w, wbar, g_ghz:θ, g_w:θ1:θ2, dicke:n:k, haar:n, zero:n
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<String>,
    /// Two states, e.g. "ghz,w"
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<String>,
    /// Link unitary angles "ax,ay,az"
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<String>,
    /// Linked qubits "a,b"
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    link: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_cut: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n_aux: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_j: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_j: Option<f64>,
    /// Comma-separated sigma_J list
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigmas: Option<String>,
    /// trapezoid, gauss_hermite or monte_carlo
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    scheme: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    spacing: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    flatness_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_dt: Option<f64>,
    /// g_ghz or g_w
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    thetas: Option<usize>,
    /// t_c CSV to fit instead of rerunning the sweep
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (&'static str, Flags) {
        match self {
            Command::Ggm(f) => ("ggm", f),
            Command::Merge(f) => ("merge", f),
            Command::Optimize(f) => ("optimize", f),
            Command::Scan(f) => ("scan", f),
            Command::Table1(f) => ("table1", f),
            Command::Chain(f) => ("chain", f),
            Command::Triangle(f) => ("triangle", f),
            Command::Dynamics(f) => ("dynamics", f),
            Command::Dicke(f) => ("dicke", f),
            Command::Disorder(f) => ("disorder", f),
            Command::TcFit(f) => ("tc-fit", f),
            Command::Suppression(f) => ("suppression", f),
            Command::Decompose(f) => ("decompose", f),
            Command::PropCheck(f) => ("prop-check", f),
        }
    }
}

fn main() -> ExitCode {
    let (name, flags) = Cli::parse().command.split();
    let Value::Object(mut overrides) = serde_json::to_value(&flags).expect("flags serialize") else {
        unreachable!("flags serialize to an object")
    };
    overrides.insert("experiment".into(), Value::String(name.into()));
    let result = ExperimentConfig::from_layers(flags.config.as_deref(), overrides).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary.results).expect("results serialize"));
            for f in &summary.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("entcirc {name}: {e}");
            ExitCode::FAILURE
        }
    }
}
