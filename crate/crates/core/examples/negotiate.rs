//! Loads a scenario file, runs the negotiation to quiescence and prints the
//! message timeline and the resulting grants.
//!
//! ```text
//! cargo run --example negotiate [scenario.json]
//! ```

use std::path::PathBuf;

use specnego::io::parse_scenario;
use specnego::kernel::{run, EventTag, SuResponse};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/two_zones.json")));
    let scenario = parse_scenario(&std::fs::read(&path)?)?;
    let report = run(&scenario)?;

    println!("{:>7}  {:<10} {:<10} message", "time", "from", "to");
    for e in &report.event_log {
        match e.kind {
            EventTag::Deliver => println!(
                "{:7.1}  {:<10} {:<10} {}",
                e.time,
                e.from.as_deref().unwrap_or("-"),
                e.to,
                e.payload_kind.map(|k| k.to_string()).unwrap_or_default()
            ),
            EventTag::AgentWake => println!("{:7.1}  {:<10} {:<10} (timer)", e.time, "", e.to),
        }
    }

    println!("\ngrants:");
    for a in &report.allocations {
        println!(
            "  {} <- {} via {}: {} channels at {} for {}",
            a.su_id, a.offer.pu_id, a.offer.cpu_id, a.granted_channels, a.offer.price, a.offer.alloc_time
        );
    }
    for (su, response) in &report.per_su_response {
        if *response == SuResponse::Unserved {
            println!("  {su}: no offer fit");
        }
    }
    println!(
        "\n{} messages, run response {:?}, quiescent at {}",
        report.msg_counts.total, report.run_response, report.quiescent_at
    );
    Ok(())
}
