//! Runs the four built-in studies and writes a CSV table and an SVG chart for
//! each into the given directory (default `./out`).
//!
//! ```text
//! cargo run --release --example experiments [out_dir]
//! ```

use std::path::PathBuf;

use specnego::experiments::{run_experiment, ExperimentId, ExperimentSpec, Metric};
use specnego::io::{emit_plot, write_metrics_table, PlotKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
    for id in ExperimentId::ALL {
        let table = run_experiment(&ExperimentSpec::new(id))?;
        println!("{}", table.title);
        for row in &table.rows {
            let value = match table.metric {
                Metric::RunResponse => format!("{}", row.value(Metric::RunResponse)),
                Metric::TotalMessages => format!("{} messages", row.total_messages),
            };
            println!("  {:<24} {value}", row.label);
        }
        let kind = if id == ExperimentId::ExpI { PlotKind::Line } else { PlotKind::Bar };
        write_metrics_table(&table, &out.join(format!("{id}.csv")))?;
        emit_plot(&table, kind, &out.join(format!("{id}.svg")))?;
    }
    println!("tables and charts written to {}", out.display());
    Ok(())
}
