//! Groups PUs around their nearest coordinator, feeds one coalition's
//! registry and asks it for its best offer.
//!
//! ```text
//! cargo run --example coalitions
//! ```

use specnego::coalition::{form_coalitions, ParamRegistry};
use specnego::model::{Coordinator, Zone, DEFAULT_WEIGHTS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coordinators = vec![
        Coordinator { id: "north".into(), zone: Zone::new(0.0, 100.0) },
        Coordinator { id: "south".into(), zone: Zone::new(0.0, -100.0) },
    ];
    // (id, position, channels, price, alloc_time)
    let pus = [
        ("pu1", Zone::new(5.0, 80.0), 3, 5.0, 30.0),
        ("pu2", Zone::new(-10.0, 95.0), 5, 9.0, 45.0),
        ("pu3", Zone::new(12.0, 60.0), 4, 7.0, 40.0),
        ("pu4", Zone::new(0.0, -70.0), 2, 4.0, 20.0),
        ("pu5", Zone::new(0.0, 0.0), 1, 3.0, 15.0),
    ];

    let membership = form_coalitions(pus.iter().map(|p| (p.0, p.1)), &coordinators, None)?;
    for (coordinator, members) in membership.groups() {
        println!("{coordinator}: {}", members.join(", "));
    }
    // pu5 sits exactly between both coordinators; the tie goes to the smaller id
    println!("pu5 joins {}", membership.coordinator_of("pu5").unwrap());

    let mut registry = ParamRegistry::new("north", membership.members("north").to_vec());
    for (id, _, channels, price, alloc_time) in pus {
        if registry.is_member(id) {
            registry.register(id, channels, price, alloc_time, 0.0)?;
        }
    }
    let best = registry.best_offer(&DEFAULT_WEIGHTS).expect("north has members with channels");
    println!(
        "north offers {} channels from {} at price {} for {}",
        best.channels, best.pu_id, best.price, best.alloc_time
    );

    // once the winner is drained it drops out of consideration
    registry.register(&best.pu_id, 0, best.price, best.alloc_time, 5.0)?;
    let next = registry.best_offer(&DEFAULT_WEIGHTS).unwrap();
    println!("after {} runs dry: {}", best.pu_id, next.pu_id);
    Ok(())
}
