mod common;

use common::{closeness_oracle, ranking_oracle};
use proptest::prelude::*;
use specnego::coalition::ParamRegistry;
use specnego::experiments::{generate_scenario, run_experiment, ExperimentId, ExperimentSpec, ScenarioParams};
use specnego::io::{export_report, metrics_table_csv, parse_scenario, render_svg, serialize_scenario, PlotKind};
use specnego::kernel::run;
use specnego::model::{Topology, DEFAULT_WEIGHTS, OFFER_SENSES};

#[test]
fn registry_winner_matches_oracle() {
    let rows = [(3u32, 5.0, 30.0), (5, 9.0, 45.0), (4, 7.0, 40.0)];
    let mut reg = ParamRegistry::new("cpu0", ["a", "b", "c"].map(String::from));
    for (id, (ch, price, t)) in ["a", "b", "c"].iter().zip(rows) {
        reg.register(id, ch, price, t, 0.0).unwrap();
    }
    let scores: Vec<Vec<f64>> = rows.iter().map(|&(c, p, t)| vec![f64::from(c), p, t]).collect();
    let oracle = ranking_oracle(&closeness_oracle(&scores, &DEFAULT_WEIGHTS, &OFFER_SENSES));
    let best = reg.best_offer(&DEFAULT_WEIGHTS).unwrap();
    assert_eq!(best.pu_id, ["a", "b", "c"][oracle[0]]);
    assert_eq!(best.cpu_id, "cpu0");
}

#[test]
fn exhausted_members_are_skipped() {
    let mut reg = ParamRegistry::new("cpu0", ["a", "b"].map(String::from));
    reg.register("a", 0, 1.0, 100.0, 0.0).unwrap();
    assert!(reg.best_offer(&DEFAULT_WEIGHTS).is_none());
    reg.register("b", 1, 20.0, 10.0, 1.0).unwrap();
    assert_eq!(reg.best_offer(&DEFAULT_WEIGHTS).unwrap().pu_id, "b");
    assert!(reg.register("z", 1, 1.0, 1.0, 0.0).is_err());
}

#[test]
fn export_is_reproducible() {
    let s = generate_scenario(&ScenarioParams::new(Topology::CpuCsu, vec![5, 5, 5]));
    let report = run(&s).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = export_report(&report, a.path()).unwrap();
    export_report(&report, b.path()).unwrap();
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let events = std::fs::read_to_string(a.path().join("events.jsonl")).unwrap();
    assert_eq!(events.lines().count(), report.event_log.len());
    for line in events.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["time"].is_number());
    }
}

#[test]
fn no_grants_gives_header_only_allocations() {
    let mut s = generate_scenario(&ScenarioParams::new(Topology::NoCoalition, vec![2]));
    for su in &mut s.sus {
        su.channels_requested = 99;
    }
    let report = run(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_report(&report, dir.path()).unwrap();
    let alloc = std::fs::read_to_string(dir.path().join("allocations.csv")).unwrap();
    assert_eq!(alloc, "su_id,pu_id,cpu_id,granted_channels,price,alloc_time\n");
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.contains("sus_served,0\n"));
}

#[test]
fn experiment_outputs_are_deterministic() {
    let spec = ExperimentSpec::new(ExperimentId::ExpII);
    let a = run_experiment(&spec).unwrap();
    let b = run_experiment(&spec).unwrap();
    assert_eq!(metrics_table_csv(&a), metrics_table_csv(&b));
    assert_eq!(render_svg(&a, PlotKind::Bar).unwrap(), render_svg(&b, PlotKind::Bar).unwrap());
    let csv = metrics_table_csv(&a);
    assert!(csv.lines().any(|l| l == "# seed: 0"));
}

fn any_params() -> impl Strategy<Value = ScenarioParams> {
    (
        prop::sample::select(Topology::ALL.to_vec()),
        any::<bool>(),
        prop::collection::vec(1usize..4, 1..4),
        any::<u64>(),
    )
        .prop_map(|(t, agg, groups, seed)| {
            let mut p = ScenarioParams::new(t, groups);
            p.aggregation = agg;
            p.seed = seed;
            p.pu_count = 4;
            p.cpu_count = 2;
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_survives_round_trip(p in any_params()) {
        let s = generate_scenario(&p);
        let text = serialize_scenario(&s);
        let back = parse_scenario(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serialize_scenario(&back), text);
    }
}
