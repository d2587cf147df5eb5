//! Drive the experiment runner from code: layered config, CSV and JSON outputs.

use serde_json::{json, Map};

use entcirc::harness::{run, ExperimentConfig};
use entcirc::Result;

fn main() -> Result<()> {
    let out = std::env::temp_dir().join("entcirc_example");
    let mut overrides = Map::new();
    overrides.insert("experiment".into(), json!("prop-check"));
    overrides.insert("samples".into(), json!(20));
    overrides.insert("out".into(), json!(out));
    let cfg = ExperimentConfig::from_layers(None, overrides)?;
    let summary = run(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&summary.results)?);
    for f in summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
