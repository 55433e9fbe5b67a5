//! Drives the event kernel one event at a time and watches a PU coalition's
//! registry fill up and the channel ledger drain.
//!
//! ```text
//! cargo run --example step_through
//! ```

use specnego::experiments::{generate_scenario, ScenarioParams};
use specnego::kernel::World;
use specnego::model::Topology;
use specnego::protocol::AgentState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut params = ScenarioParams::new(Topology::CpuOnly, vec![3]);
    params.pu_count = 6;
    params.cpu_count = 2;
    let scenario = generate_scenario(&params);
    let mut world = World::new(&scenario)?;

    let total = |w: &World| w.capacities().values().sum::<u32>();
    println!("start: {} events queued, {} channels free", world.pending(), total(&world));
    while !world.is_quiescent() {
        world.step()?;
        let e = world.log().last().expect("an event was just logged");
        let what = e.payload_kind.map_or("wake".to_string(), |k| k.to_string());
        print!("t={:<6} {:<12} -> {:<7}", e.time, what, e.to);
        if let Some(AgentState::PuCoalition(c)) = world.agent(&e.to) {
            print!(" registry holds {} PUs", c.registry.len());
        }
        println!("  free channels {}", total(&world));
    }

    let report = world.into_report();
    println!("{} of {} SUs served", report.served(), report.per_su_response.len());
    Ok(())
}
