use std::collections::BTreeMap;

use proptest::prelude::*;
use specnego::experiments::{expected_messages, generate_scenario, ScenarioParams};
use specnego::kernel::{run, EventTag, RunReport, SuResponse, World};
use specnego::model::{Scenario, Topology};
use specnego::protocol::MessageKind;

fn scenario(topology: Topology, aggregation: bool, groups: Vec<usize>) -> Scenario {
    let mut p = ScenarioParams::new(topology, groups);
    p.aggregation = aggregation;
    generate_scenario(&p)
}

fn closed_form(s: &Scenario) -> u64 {
    expected_messages(
        s.topology,
        s.aggregation,
        s.sus.len() as u64,
        s.pus.len() as u64,
        s.cpu_coordinators.len() as u64,
        s.csu_coordinators.len() as u64,
    )
    .unwrap()
}

/// Checks that hold for every finished run.
fn check_invariants(s: &Scenario, r: &RunReport) {
    let delivered = r.event_log.iter().filter(|e| e.kind == EventTag::Deliver).count() as u64;
    assert_eq!(r.msg_counts.total, delivered);
    assert_eq!(r.sent_messages, r.msg_counts.total, "every sent message is delivered");
    assert_eq!(r.msg_counts.per_kind.values().sum::<u64>(), r.msg_counts.total);
    let sent: u64 = r.per_agent.values().map(|t| t.sent).sum();
    let received: u64 = r.per_agent.values().map(|t| t.received).sum();
    assert_eq!(sent, r.msg_counts.total);
    assert_eq!(received, r.msg_counts.total);
    assert!(r.violations.is_empty(), "{:?}", r.violations);

    let mut granted: BTreeMap<&str, u32> = BTreeMap::new();
    for a in &r.allocations {
        assert!(a.granted_channels >= 1);
        *granted.entry(a.offer.pu_id.as_str()).or_default() += a.granted_channels;
    }
    for pu in &s.pus {
        let g = granted.get(pu.id.as_str()).copied().unwrap_or(0);
        assert!(g <= pu.channels, "{} over-allocated", pu.id);
        assert_eq!(r.initial_capacity[&pu.id], pu.channels);
        assert_eq!(r.final_capacity[&pu.id], pu.channels - g);
    }

    assert_eq!(r.per_su_response.len(), s.sus.len());
    assert_eq!(r.served(), r.allocations.len());
    for w in r.event_log.windows(2) {
        assert!(w[0].time <= w[1].time, "clock ran backwards");
    }
}

#[test]
fn single_su_trace() {
    let s = scenario(Topology::CpuCsu, true, vec![1]);
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    assert_eq!(r.run_response, Some(52.0));
    let cfp: Vec<f64> = r
        .event_log
        .iter()
        .filter(|e| e.payload_kind == Some(MessageKind::Cfp))
        .map(|e| e.time)
        .collect();
    // fired at 15, delivered one link later
    assert_eq!(cfp, vec![25.0; 5]);
    let offers_at: Vec<f64> = r
        .event_log
        .iter()
        .filter(|e| matches!(e.payload_kind, Some(MessageKind::CpuOffer | MessageKind::CpuNoOffer)))
        .map(|e| e.time)
        .collect();
    assert_eq!(offers_at, vec![37.0; 5]);
    assert_eq!(r.quiescent_at, 52.0);
}

#[test]
fn ten_staggered_sus_trace() {
    let s = scenario(Topology::CpuCsu, true, vec![10]);
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    let fired = r
        .event_log
        .iter()
        .find(|e| e.payload_kind == Some(MessageKind::Cfp))
        .unwrap()
        .time;
    assert_eq!(fired, 970.0);
    assert_eq!(r.run_response, Some(997.0));
}

#[test]
fn reference_topology_totals() {
    let cases = [
        (Topology::NoCoalition, true, vec![15], 450),
        (Topology::CpuOnly, true, vec![15], 165),
        (Topology::CpuCsu, true, vec![5, 5, 5], 75),
        (Topology::CpuCsu, false, vec![5, 5, 5], 195),
    ];
    for (topology, aggregation, groups, expected) in cases {
        let s = scenario(topology, aggregation, groups);
        let r = run(&s).unwrap();
        check_invariants(&s, &r);
        assert_eq!(r.msg_counts.total, expected, "{topology} aggregation={aggregation}");
        assert_eq!(closed_form(&s), expected);
    }
}

#[test]
fn direct_sus_query_every_pu() {
    let s = scenario(Topology::NoCoalition, true, vec![15]);
    let r = run(&s).unwrap();
    for su in &s.sus {
        let t = r.per_agent[&su.id];
        assert_eq!((t.sent, t.received), (15, 15), "{}", su.id);
    }
    assert_eq!(r.msg_counts.get(MessageKind::ParamUpdate), 0);
}

#[test]
fn kind_breakdown_for_full_topology() {
    let s = scenario(Topology::CpuCsu, true, vec![5, 5, 5]);
    let r = run(&s).unwrap();
    let c = &r.msg_counts;
    assert_eq!(c.get(MessageKind::ParamUpdate), 15);
    assert_eq!(c.get(MessageKind::SuRequest), 15);
    assert_eq!(c.get(MessageKind::SuReply), 15);
    assert_eq!(c.get(MessageKind::Cfp), 15);
    assert_eq!(c.get(MessageKind::CpuOffer) + c.get(MessageKind::CpuNoOffer), 15);
    assert_eq!(c.get(MessageKind::CfpSingle), 0);
}

#[test]
fn unmet_demand_is_reported_unserved() {
    let mut s = scenario(Topology::CpuOnly, true, vec![3]);
    for pu in &mut s.pus {
        pu.channels = 1;
    }
    for su in &mut s.sus {
        su.channels_requested = 4;
    }
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    assert_eq!(r.served(), 0);
    assert!(r.per_su_response.values().all(|v| *v == SuResponse::Unserved));
    assert_eq!(r.msg_counts.total, closed_form(&s));
}

#[test]
fn stepping_matches_run() {
    let s = scenario(Topology::CpuCsu, false, vec![2, 3]);
    let mut w = World::new(&s).unwrap();
    let mut last = 0.0;
    while !w.is_quiescent() {
        w.step().unwrap();
        assert!(w.now() >= last);
        last = w.now();
    }
    assert_eq!(w.into_report(), run(&s).unwrap());
}

#[test]
fn identical_inputs_give_identical_reports() {
    for topology in Topology::ALL {
        let groups = if topology == Topology::CpuCsu { vec![4, 4, 2] } else { vec![10] };
        let s = scenario(topology, true, groups);
        let a = serde_json::to_string(&run(&s).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&s.clone()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

fn params() -> impl Strategy<Value = ScenarioParams> {
    (
        prop::sample::select(Topology::ALL.to_vec()),
        any::<bool>(),
        1usize..12,
        1usize..5,
        prop::collection::vec(1usize..6, 1..5),
        any::<u64>(),
    )
        .prop_map(|(topology, aggregation, pus, cpus, groups, seed)| {
            let mut p = ScenarioParams::new(topology, groups);
            p.aggregation = aggregation;
            p.pu_count = pus;
            p.cpu_count = cpus;
            p.seed = seed;
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn totals_follow_closed_form(p in params()) {
        let s = generate_scenario(&p);
        let r = run(&s).unwrap();
        prop_assert_eq!(r.msg_counts.total, closed_form(&s));
        check_invariants(&s, &r);
    }

    #[test]
    fn runs_are_deterministic(p in params()) {
        let s = generate_scenario(&p);
        prop_assert_eq!(run(&s).unwrap(), run(&s).unwrap());
    }

    #[test]
    fn same_seed_same_scenario(p in params()) {
        prop_assert_eq!(generate_scenario(&p), generate_scenario(&p));
    }
}

#[test]
fn topology_ordering_needs_two_or_more_sus() {
    // one SU in one SU coalition pays the coalition overhead without sharing it
    let count = |t: Topology, csus: u64| expected_messages(t, true, 1, 15, 5, csus).unwrap();
    assert_eq!(count(Topology::CpuOnly, 0), 25);
    assert_eq!(count(Topology::CpuCsu, 1), 27);
    for s in 2..=50u64 {
        let csus = s.div_ceil(5);
        let a = expected_messages(Topology::NoCoalition, true, s, 15, 0, 0).unwrap();
        let b = expected_messages(Topology::CpuOnly, true, s, 15, 5, 0).unwrap();
        let c = expected_messages(Topology::CpuCsu, true, s, 15, 5, csus).unwrap();
        assert!(a > b && b > c, "S={s}: {a} {b} {c}");
    }
}
