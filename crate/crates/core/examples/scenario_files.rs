//! Generates a scenario, saves it as JSON, shows what validation reports for
//! a broken copy, then runs the saved file and exports the report files.
//!
//! ```text
//! cargo run --example scenario_files [out_dir]
//! ```

use std::path::PathBuf;

use specnego::experiments::{generate_scenario, ScenarioParams};
use specnego::io::{export_report, parse_scenario, serialize_scenario, ScenarioError};
use specnego::kernel::run;
use specnego::model::Topology;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/scenario"));
    std::fs::create_dir_all(&out)?;

    let mut params = ScenarioParams::new(Topology::CpuCsu, vec![4, 4]);
    params.seed = 2024;
    let scenario = generate_scenario(&params);
    let path = out.join("scenario.json");
    std::fs::write(&path, serialize_scenario(&scenario))?;
    println!("saved {}", path.display());

    let mut broken: serde_json::Value = serde_json::from_str(&serialize_scenario(&scenario))?;
    broken["timing"]["latency"] = serde_json::json!(-1.0);
    broken["sus"][2]["channels_requested"] = serde_json::json!(0);
    match parse_scenario(broken.to_string().as_bytes()) {
        Err(ScenarioError::Invalid(problems)) => {
            for p in problems {
                println!("  rejected: {p}");
            }
        }
        other => println!("unexpected: {other:?}"),
    }
    broken["sus"][0]["colour"] = serde_json::json!("red");
    if let Err(e) = parse_scenario(broken.to_string().as_bytes()) {
        println!("  rejected: {e}");
    }

    let loaded = parse_scenario(&std::fs::read(&path)?)?;
    let report = run(&loaded)?;
    for file in export_report(&report, &out)? {
        println!("wrote {}", file.display());
    }
    Ok(())
}
