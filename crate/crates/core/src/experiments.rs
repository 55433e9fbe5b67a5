//! Closed-form message accounting, scenario generation and the four
//! comparative studies.
//!
//! | id      | varies                              | reports        |
//! |---------|-------------------------------------|----------------|
//! | exp_i   | SUs in a single SU coalition        | run response   |
//! | exp_ii  | how 10 SUs are split into coalitions| run response   |
//! | exp_iii | how 1000 SUs are split              | message total  |
//! | exp_iv  | SU count, across the 3 topologies   | message total  |
//!
//! Every generated scenario places PU coalition `k` at `(1000k, 0)` with its
//! PUs scattered within 100 units, and SU coalition `j` at `(1000j, 10000)`
//! likewise, so geographic coalition formation reproduces the intended
//! groups. SU `i` of a group arrives at `100·i`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{run_with_cap, SimError, DEFAULT_EVENT_CAP};
use crate::model::{Coordinator, PrimaryUser, Scenario, SecondaryUser, Timing, Topology, Zone, DEFAULT_WEIGHTS};
use crate::protocol::MessageKind;

pub const PU_CHANNELS: (u32, u32) = (1, 8);
pub const PU_PRICE: (f64, f64) = (5.0, 20.0);
pub const PU_ALLOC_TIME: (f64, f64) = (10.0, 120.0);
pub const SU_CHANNELS: (u32, u32) = (1, 4);
pub const ARRIVAL_SPACING: f64 = 100.0;
pub const DEFAULT_SU_SWEEP: [usize; 5] = [5, 10, 15, 20, 25];
/// SUs per coalition in the full topology of exp_iv.
pub const EXP_IV_CSU_SIZE: usize = 5;

const COORD_SPACING: f64 = 1000.0;
const SCATTER: f64 = 100.0;
const SU_ROW_Y: f64 = 10_000.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid count combination: {0}")]
    InvalidCounts(String),
    #[error("unknown experiment `{0}` (expected exp_i, exp_ii, exp_iii or exp_iv)")]
    UnknownExperiment(String),
    #[error("{label}: simulated {simulated} messages but the closed form gives {expected}")]
    CountMismatch { label: String, simulated: u64, expected: u64 },
    #[error("{label}: {source}")]
    Sim {
        label: String,
        #[source]
        source: SimError,
    },
}

/// Total directed messages for one negotiation round.
///
/// `s` SUs, `p` PUs, `ccpu` PU coalitions, `ccsu` SU coalitions. The
/// PU registrations (`p` `ParamUpdate`s) are counted whenever PU
/// coalitions exist.
pub fn expected_messages(
    topology: Topology,
    aggregation: bool,
    s: u64,
    p: u64,
    ccpu: u64,
    ccsu: u64,
) -> Result<u64, ExperimentError> {
    let bad = |msg: &str| Err(ExperimentError::InvalidCounts(format!("{topology}: {msg}")));
    match topology {
        Topology::NoCoalition => {
            if ccpu > 0 || ccsu > 0 {
                return bad("takes no coalitions");
            }
            Ok(2 * s * p)
        }
        Topology::CpuOnly => {
            if ccpu == 0 {
                return bad("needs at least one PU coalition");
            }
            if ccsu > 0 {
                return bad("takes no SU coalitions");
            }
            Ok(p + 2 * s * ccpu)
        }
        Topology::CpuCsu => {
            if ccpu == 0 || ccsu == 0 {
                return bad("needs PU and SU coalitions");
            }
            if ccsu > s {
                return bad("more SU coalitions than SUs");
            }
            if aggregation {
                Ok(p + 2 * s + 2 * ccsu * ccpu)
            } else {
                Ok(p + 2 * s + 2 * s * ccpu)
            }
        }
    }
}

/// Knobs for [`generate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub topology: Topology,
    pub aggregation: bool,
    pub pu_count: usize,
    pub cpu_count: usize,
    /// SU group sizes. In the full topology each group becomes one SU
    /// coalition; otherwise the groups only shape arrival times.
    pub su_groups: Vec<usize>,
    pub seed: u64,
    pub weights: [f64; 3],
    pub timing: Timing,
}

impl ScenarioParams {
    pub fn new(topology: Topology, su_groups: Vec<usize>) -> Self {
        Self {
            topology,
            aggregation: true,
            pu_count: 15,
            cpu_count: 5,
            su_groups,
            seed: 0,
            weights: DEFAULT_WEIGHTS,
            timing: Timing::default(),
        }
    }

    pub fn su_count(&self) -> usize {
        self.su_groups.iter().sum()
    }
}

/// Deterministically builds a scenario from `params`. PU parameters are drawn
/// first, so every configuration sharing a seed sees the same PUs.
pub fn generate_scenario(params: &ScenarioParams) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut scenario = Scenario::new(params.topology);
    scenario.seed = params.seed;
    scenario.aggregation = params.aggregation;
    scenario.weights = params.weights;
    scenario.timing = params.timing;

    let with_cpus = params.topology != Topology::NoCoalition;
    let with_csus = params.topology == Topology::CpuCsu;
    let cpu_slots = params.cpu_count.max(1);

    for i in 0..params.pu_count {
        let home = (i % cpu_slots) as f64 * COORD_SPACING;
        let channels = rng.gen_range(PU_CHANNELS.0..=PU_CHANNELS.1);
        let price = rng.gen_range(PU_PRICE.0..=PU_PRICE.1);
        let alloc_time = rng.gen_range(PU_ALLOC_TIME.0..=PU_ALLOC_TIME.1);
        let zone = Zone::new(
            home + rng.gen_range(-SCATTER..=SCATTER),
            rng.gen_range(-SCATTER..=SCATTER),
        );
        scenario.pus.push(PrimaryUser {
            id: format!("pu{i:03}"),
            zone,
            channels,
            price,
            alloc_time,
        });
    }
    if with_cpus {
        for k in 0..params.cpu_count {
            scenario.cpu_coordinators.push(Coordinator {
                id: format!("cpu{k:03}"),
                zone: Zone::new(k as f64 * COORD_SPACING, 0.0),
            });
        }
    }

    let mut n = 0;
    for (j, &size) in params.su_groups.iter().enumerate() {
        let home = j as f64 * COORD_SPACING;
        if with_csus {
            scenario.csu_coordinators.push(Coordinator {
                id: format!("csu{j:03}"),
                zone: Zone::new(home, SU_ROW_Y),
            });
        }
        for i in 0..size {
            let channels_requested = rng.gen_range(SU_CHANNELS.0..=SU_CHANNELS.1);
            let zone = Zone::new(
                home + rng.gen_range(-SCATTER..=SCATTER),
                SU_ROW_Y + rng.gen_range(-SCATTER..=SCATTER),
            );
            scenario.sus.push(SecondaryUser {
                id: format!("su{n:04}"),
                zone,
                channels_requested,
                arrival_time: i as f64 * ARRIVAL_SPACING,
            });
            n += 1;
        }
    }
    scenario
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExperimentId {
    #[serde(rename = "exp_i")]
    ExpI,
    #[serde(rename = "exp_ii")]
    ExpII,
    #[serde(rename = "exp_iii")]
    ExpIII,
    #[serde(rename = "exp_iv")]
    ExpIV,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::ExpI,
        ExperimentId::ExpII,
        ExperimentId::ExpIII,
        ExperimentId::ExpIV,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::ExpI => "exp_i",
            ExperimentId::ExpII => "exp_ii",
            ExperimentId::ExpIII => "exp_iii",
            ExperimentId::ExpIV => "exp_iv",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ExperimentError::UnknownExperiment(s.to_string()))
    }
}

/// What an experiment plots on its y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Metric {
    RunResponse,
    TotalMessages,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::RunResponse => "run response (sim time)",
            Metric::TotalMessages => "messages exchanged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub seed: u64,
    pub pu_count: usize,
    pub cpu_count: usize,
    pub weights: [f64; 3],
    pub timing: Timing,
    /// SU counts for exp_iv.
    pub su_sweep: Vec<usize>,
    pub event_cap: u64,
}

impl ExperimentSpec {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            seed: 0,
            pu_count: 15,
            cpu_count: 5,
            weights: DEFAULT_WEIGHTS,
            timing: Timing::default(),
            su_sweep: DEFAULT_SU_SWEEP.to_vec(),
            event_cap: DEFAULT_EVENT_CAP,
        }
    }

    /// One entry per table row, in row order.
    pub fn configurations(&self) -> Vec<Configuration> {
        let base = |topology, groups: Vec<usize>| ScenarioParams {
            topology,
            aggregation: true,
            pu_count: self.pu_count,
            cpu_count: self.cpu_count,
            su_groups: groups,
            seed: self.seed,
            weights: self.weights,
            timing: self.timing,
        };
        match self.id {
            ExperimentId::ExpI => [1, 2, 3, 4, 5, 10]
                .into_iter()
                .map(|n| Configuration {
                    label: format!("1 CSU x {n} SU"),
                    series: Topology::CpuCsu.to_string(),
                    swept: n as f64,
                    params: base(Topology::CpuCsu, vec![n]),
                })
                .collect(),
            ExperimentId::ExpII => split_configs(&[(5, 2), (2, 5), (1, 10)], |g| base(Topology::CpuCsu, g)),
            ExperimentId::ExpIII => split_configs(&[(500, 2), (100, 10), (40, 25), (1, 1000)], |g| {
                base(Topology::CpuCsu, g)
            }),
            ExperimentId::ExpIV => self
                .su_sweep
                .iter()
                .flat_map(|&s| {
                    let groups = chunk_sizes(s, EXP_IV_CSU_SIZE);
                    Topology::ALL.into_iter().map(move |t| (s, t, groups.clone()))
                })
                .map(|(s, topology, groups)| Configuration {
                    label: format!("{topology} S={s}"),
                    series: topology.to_string(),
                    swept: s as f64,
                    params: base(topology, groups),
                })
                .collect(),
        }
    }

    fn describe(&self) -> (&'static str, &'static str, Metric) {
        match self.id {
            ExperimentId::ExpI => ("Response time vs SUs in one SU coalition", "SUs in the coalition", Metric::RunResponse),
            ExperimentId::ExpII => ("Response time vs number of SU coalitions (10 SUs)", "SU coalitions", Metric::RunResponse),
            ExperimentId::ExpIII => ("Messages vs number of SU coalitions (1000 SUs)", "SU coalitions", Metric::TotalMessages),
            ExperimentId::ExpIV => ("Messages per topology", "SUs", Metric::TotalMessages),
        }
    }
}

fn split_configs(splits: &[(usize, usize)], params: impl Fn(Vec<usize>) -> ScenarioParams) -> Vec<Configuration> {
    splits
        .iter()
        .map(|&(csus, per)| Configuration {
            label: format!("{csus} CSU x {per} SU"),
            series: Topology::CpuCsu.to_string(),
            swept: csus as f64,
            params: params(vec![per; csus]),
        })
        .collect()
}

/// Splits `total` into groups of `size`, the last one possibly smaller.
fn chunk_sizes(total: usize, size: usize) -> Vec<usize> {
    let mut out = vec![size; total / size];
    if !total.is_multiple_of(size) {
        out.push(total % size);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub label: String,
    pub series: String,
    pub swept: f64,
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub label: String,
    pub series: String,
    pub swept: f64,
    pub su_count: usize,
    pub csu_count: usize,
    pub total_messages: u64,
    pub expected_messages: u64,
    pub run_response: Option<f64>,
    pub served: usize,
    pub per_kind: BTreeMap<MessageKind, u64>,
}

impl MetricsRow {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::RunResponse => self.run_response.unwrap_or(0.0),
            Metric::TotalMessages => self.total_messages as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsTable {
    pub experiment: ExperimentId,
    pub title: String,
    pub x_label: String,
    pub metric: Metric,
    /// Provenance lines emitted above the CSV header.
    pub notes: Vec<String>,
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    /// Distinct series names in first-seen order.
    pub fn series(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.series.as_str()) {
                out.push(&row.series);
            }
        }
        out
    }

    pub fn row(&self, series: &str, swept: f64) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.series == series && r.swept == swept)
    }
}

/// Runs one configuration and checks its message total against the closed form.
pub fn run_configuration(config: &Configuration, event_cap: u64) -> Result<MetricsRow, ExperimentError> {
    let p = &config.params;
    let scenario = generate_scenario(p);
    let report = run_with_cap(&scenario, event_cap).map_err(|source| ExperimentError::Sim {
        label: config.label.clone(),
        source,
    })?;
    let expected = expected_messages(
        p.topology,
        p.aggregation,
        scenario.sus.len() as u64,
        scenario.pus.len() as u64,
        scenario.cpu_coordinators.len() as u64,
        scenario.csu_coordinators.len() as u64,
    )?;
    if report.msg_counts.total != expected {
        return Err(ExperimentError::CountMismatch {
            label: config.label.clone(),
            simulated: report.msg_counts.total,
            expected,
        });
    }
    Ok(MetricsRow {
        label: config.label.clone(),
        series: config.series.clone(),
        swept: config.swept,
        su_count: scenario.sus.len(),
        csu_count: scenario.csu_coordinators.len(),
        total_messages: report.msg_counts.total,
        expected_messages: expected,
        run_response: report.run_response,
        served: report.served(),
        per_kind: report.msg_counts.per_kind.clone(),
    })
}

/// Runs every configuration of `spec` (in parallel) and assembles the rows in
/// configuration order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<MetricsTable, ExperimentError> {
    let rows = spec
        .configurations()
        .par_iter()
        .map(|c| run_configuration(c, spec.event_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let (title, x_label, metric) = spec.describe();
    let notes = vec![
        format!("experiment: {}", spec.id),
        format!("seed: {}", spec.seed),
        format!("PUs: {}, PU coalitions: {}", spec.pu_count, spec.cpu_count),
        format!(
            "PU parameters uniform: channels in [{}, {}], price in [{}, {}], alloc_time in [{}, {}]",
            PU_CHANNELS.0, PU_CHANNELS.1, PU_PRICE.0, PU_PRICE.1, PU_ALLOC_TIME.0, PU_ALLOC_TIME.1
        ),
        format!("SU requests uniform in [{}, {}] channels", SU_CHANNELS.0, SU_CHANNELS.1),
        format!("SU i of each group arrives at {ARRIVAL_SPACING} * i"),
        "message totals include one ParamUpdate per PU when PU coalitions exist".to_string(),
        format!(
            "timing: latency {}, agg_per_demand {}, cpu_select {}, rank_per_offer {}, pu_reply {} (sim time units)",
            spec.timing.latency,
            spec.timing.agg_per_demand,
            spec.timing.cpu_select,
            spec.timing.rank_per_offer,
            spec.timing.pu_reply
        ),
        format!(
            "weights (channels, price, alloc_time): ({}, {}, {})",
            spec.weights[0], spec.weights[1], spec.weights[2]
        ),
    ];
    Ok(MetricsTable {
        experiment: spec.id,
        title: title.to_string(),
        x_label: x_label.to_string(),
        metric,
        notes,
        rows,
    })
}
