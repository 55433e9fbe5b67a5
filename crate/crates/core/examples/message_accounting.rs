//! Compares the simulated message totals of every topology with their closed
//! forms on the 15 PU / 5 PU-coalition reference network.
//!
//! ```text
//! cargo run --example message_accounting
//! ```

use specnego::experiments::{expected_messages, generate_scenario, ScenarioParams};
use specnego::kernel::run;
use specnego::model::Topology;
use specnego::protocol::MessageKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setups = [
        (Topology::NoCoalition, true, vec![15]),
        (Topology::CpuOnly, true, vec![15]),
        (Topology::CpuCsu, true, vec![5, 5, 5]),
        (Topology::CpuCsu, false, vec![5, 5, 5]),
    ];
    for (topology, aggregation, groups) in setups {
        let mut params = ScenarioParams::new(topology, groups);
        params.aggregation = aggregation;
        let s = generate_scenario(&params);
        let report = run(&s)?;
        let expected = expected_messages(
            topology,
            aggregation,
            s.sus.len() as u64,
            s.pus.len() as u64,
            s.cpu_coordinators.len() as u64,
            s.csu_coordinators.len() as u64,
        )?;
        let label = match (topology, aggregation) {
            (Topology::CpuCsu, false) => format!("{topology} (per demand)"),
            _ => topology.to_string(),
        };
        println!("{label:<24} simulated {:>4}  closed form {expected:>4}", report.msg_counts.total);
        for kind in MessageKind::ALL {
            let n = report.msg_counts.get(kind);
            if n > 0 {
                println!("    {kind:<12} {n}");
            }
        }
    }
    Ok(())
}
