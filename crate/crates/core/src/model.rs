//! Agents, zones, offers and the scenario that configures a run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coalition::form_coalitions;
use crate::topsis::CriterionSense;

/// Default criterion weights for (channels, price, alloc_time).
pub const DEFAULT_WEIGHTS: [f64; 3] = [0.2, 0.5, 0.3];

/// Criterion senses for (channels, price, alloc_time): more channels and a
/// longer allocation are better, a lower price is better.
pub const OFFER_SENSES: [CriterionSense; 3] = [
    CriterionSense::Benefit,
    CriterionSense::Cost,
    CriterionSense::Benefit,
];

/// A point in the plane, in abstract distance units. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Zone {
    pub x: f64,
    pub y: f64,
}

impl Zone {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_sq(&self, other: &Zone) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Zone {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Zone> for [f64; 2] {
    fn from(z: Zone) -> Self {
        [z.x, z.y]
    }
}

/// A licensed spectrum holder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimaryUser {
    pub id: String,
    pub zone: Zone,
    pub channels: u32,
    pub price: f64,
    pub alloc_time: f64,
}

/// An unlicensed user that issues one channel request at `arrival_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondaryUser {
    pub id: String,
    pub zone: Zone,
    pub channels_requested: u32,
    pub arrival_time: f64,
}

/// A coalition coordinator (either a PU coalition or an SU coalition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coordinator {
    pub id: String,
    pub zone: Zone,
}

/// A PU's terms as quoted to a requester.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offer {
    pub pu_id: String,
    /// The agent that quoted the offer: the PU coalition, or the PU itself
    /// when no coalitions exist.
    pub cpu_id: String,
    pub channels: u32,
    pub price: f64,
    pub alloc_time: f64,
}

impl Offer {
    pub fn criteria(&self) -> [f64; 3] {
        [f64::from(self.channels), self.price, self.alloc_time]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// SUs query every PU directly.
    NoCoalition,
    /// PUs register with PU coalitions; SUs query every coalition.
    CpuOnly,
    /// SU coalitions negotiate with PU coalitions on behalf of their members.
    CpuCsu,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::NoCoalition, Topology::CpuOnly, Topology::CpuCsu];

    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::NoCoalition => "no_coalition",
            Topology::CpuOnly => "cpu_only",
            Topology::CpuCsu => "cpu_csu",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Processing and transport delays, in sim time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Timing {
    /// One-way delay of every link.
    pub latency: f64,
    /// SU-coalition cost per collected demand before it sends its CFPs.
    pub agg_per_demand: f64,
    /// PU-coalition cost to select its best offer for a CFP.
    pub cpu_select: f64,
    /// Ranking cost per received offer.
    pub rank_per_offer: f64,
    /// PU cost to answer a direct request.
    pub pu_reply: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self {
            latency: 10.0,
            agg_per_demand: 5.0,
            cpu_select: 2.0,
            rank_per_offer: 1.0,
            pu_reply: 2.0,
        }
    }
}

impl Timing {
    fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("latency", self.latency),
            ("agg_per_demand", self.agg_per_demand),
            ("cpu_select", self.cpu_select),
            ("rank_per_offer", self.rank_per_offer),
            ("pu_reply", self.pu_reply),
        ]
    }
}

/// Explicit coordinator → members maps that replace geographic assignment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Memberships {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pus: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sus: Option<BTreeMap<String, Vec<String>>>,
}

fn default_weights() -> [f64; 3] {
    DEFAULT_WEIGHTS
}

fn default_aggregation() -> bool {
    true
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    pub topology: Topology,
    #[serde(default = "default_aggregation")]
    pub aggregation: bool,
    #[serde(default = "default_weights")]
    pub weights: [f64; 3],
    #[serde(default)]
    pub timing: Timing,
    pub pus: Vec<PrimaryUser>,
    pub sus: Vec<SecondaryUser>,
    #[serde(default)]
    pub cpu_coordinators: Vec<Coordinator>,
    #[serde(default)]
    pub csu_coordinators: Vec<Coordinator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memberships: Option<Memberships>,
}

impl Scenario {
    /// An empty scenario with default weights and timing.
    pub fn new(topology: Topology) -> Self {
        Self {
            seed: 0,
            topology,
            aggregation: true,
            weights: DEFAULT_WEIGHTS,
            timing: Timing::default(),
            pus: Vec::new(),
            sus: Vec::new(),
            cpu_coordinators: Vec::new(),
            csu_coordinators: Vec::new(),
            memberships: None,
        }
    }

    pub fn pu_override(&self) -> Option<&BTreeMap<String, Vec<String>>> {
        self.memberships.as_ref().and_then(|m| m.pus.as_ref())
    }

    pub fn su_override(&self) -> Option<&BTreeMap<String, Vec<String>>> {
        self.memberships.as_ref().and_then(|m| m.sus.as_ref())
    }
}

/// One invariant violation, located by a path such as `pus[3].price`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Checks every scenario invariant. An empty result means the scenario is
/// runnable.
pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();

    for (j, w) in scenario.weights.iter().enumerate() {
        if !(w.is_finite() && *w > 0.0) {
            out.push(Violation::new(format!("weights[{j}]"), format!("weight must be positive, got {w}")));
        }
    }
    for (name, value) in scenario.timing.fields() {
        if !(value.is_finite() && value >= 0.0) {
            out.push(Violation::new(
                format!("timing.{name}"),
                format!("must be a non-negative finite number, got {value}"),
            ));
        }
    }

    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    let mut check_id = |id: &str, path: String, out: &mut Vec<Violation>| {
        if id.is_empty() {
            out.push(Violation::new(format!("{path}.id"), "id must not be empty"));
        } else if let Some(first) = seen.get(id) {
            out.push(Violation::new(
                format!("{path}.id"),
                format!("duplicate id `{id}` (first used at {first})"),
            ));
        } else {
            seen.insert(id.to_string(), path);
        }
    };

    for (i, pu) in scenario.pus.iter().enumerate() {
        let path = format!("pus[{i}]");
        check_id(&pu.id, path.clone(), &mut out);
        if !pu.zone.is_finite() {
            out.push(Violation::new(format!("{path}.zone"), "coordinates must be finite"));
        }
        if !(pu.price.is_finite() && pu.price > 0.0) {
            out.push(Violation::new(format!("{path}.price"), format!("must be positive, got {}", pu.price)));
        }
        if !(pu.alloc_time.is_finite() && pu.alloc_time > 0.0) {
            out.push(Violation::new(
                format!("{path}.alloc_time"),
                format!("must be positive, got {}", pu.alloc_time),
            ));
        }
    }
    for (i, su) in scenario.sus.iter().enumerate() {
        let path = format!("sus[{i}]");
        check_id(&su.id, path.clone(), &mut out);
        if !su.zone.is_finite() {
            out.push(Violation::new(format!("{path}.zone"), "coordinates must be finite"));
        }
        if su.channels_requested == 0 {
            out.push(Violation::new(format!("{path}.channels_requested"), "must be at least 1"));
        }
        if !(su.arrival_time.is_finite() && su.arrival_time >= 0.0) {
            out.push(Violation::new(
                format!("{path}.arrival_time"),
                format!("must be a non-negative finite time, got {}", su.arrival_time),
            ));
        }
    }
    for (field, coords) in [
        ("cpu_coordinators", &scenario.cpu_coordinators),
        ("csu_coordinators", &scenario.csu_coordinators),
    ] {
        for (i, c) in coords.iter().enumerate() {
            let path = format!("{field}[{i}]");
            check_id(&c.id, path.clone(), &mut out);
            if !c.zone.is_finite() {
                out.push(Violation::new(format!("{path}.zone"), "coordinates must be finite"));
            }
        }
    }

    let cpus = scenario.cpu_coordinators.len();
    let csus = scenario.csu_coordinators.len();
    match scenario.topology {
        Topology::NoCoalition => {
            if cpus > 0 {
                out.push(Violation::new("cpu_coordinators", "no_coalition topology takes no PU coalitions"));
            }
            if csus > 0 {
                out.push(Violation::new("csu_coordinators", "no_coalition topology takes no SU coalitions"));
            }
        }
        Topology::CpuOnly => {
            if cpus == 0 {
                out.push(Violation::new("cpu_coordinators", "cpu_only topology needs at least one PU coalition"));
            }
            if csus > 0 {
                out.push(Violation::new("csu_coordinators", "cpu_only topology takes no SU coalitions"));
            }
        }
        Topology::CpuCsu => {
            if cpus == 0 {
                out.push(Violation::new("cpu_coordinators", "cpu_csu topology needs at least one PU coalition"));
            }
            if csus == 0 {
                out.push(Violation::new("csu_coordinators", "cpu_csu topology needs at least one SU coalition"));
            }
        }
    }

    if scenario.topology == Topology::CpuCsu && csus > 0 {
        check_su_coalitions_nonempty(scenario, &mut out);
    }

    if let Some(map) = scenario.pu_override() {
        check_override(
            "memberships.pus",
            map,
            &scenario.cpu_coordinators,
            scenario.pus.iter().map(|p| p.id.as_str()),
            &mut out,
        );
    }
    if let Some(map) = scenario.su_override() {
        check_override(
            "memberships.sus",
            map,
            &scenario.csu_coordinators,
            scenario.sus.iter().map(|s| s.id.as_str()),
            &mut out,
        );
    }

    out
}

/// An SU coalition without members would never negotiate, so every one
/// must end up with at least one SU.
fn check_su_coalitions_nonempty(scenario: &Scenario, out: &mut Vec<Violation>) {
    let Ok(membership) = form_coalitions(
        scenario.sus.iter().map(|s| (s.id.as_str(), s.zone)),
        &scenario.csu_coordinators,
        scenario.su_override(),
    ) else {
        // override problems are reported by check_override
        return;
    };
    for (i, c) in scenario.csu_coordinators.iter().enumerate() {
        if membership.members(&c.id).is_empty() {
            out.push(Violation::new(
                format!("csu_coordinators[{i}]"),
                format!("SU coalition `{}` has no members", c.id),
            ));
        }
    }
}

fn check_override<'a>(
    path: &str,
    map: &BTreeMap<String, Vec<String>>,
    coordinators: &[Coordinator],
    agents: impl Iterator<Item = &'a str>,
    out: &mut Vec<Violation>,
) {
    let known_coords: BTreeSet<&str> = coordinators.iter().map(|c| c.id.as_str()).collect();
    let known_agents: BTreeSet<&str> = agents.collect();
    let mut assigned: BTreeSet<&str> = BTreeSet::new();
    for (coord, members) in map {
        if !known_coords.contains(coord.as_str()) {
            out.push(Violation::new(format!("{path}.{coord}"), format!("unknown coordinator `{coord}`")));
        }
        for (k, member) in members.iter().enumerate() {
            if !known_agents.contains(member.as_str()) {
                out.push(Violation::new(format!("{path}.{coord}[{k}]"), format!("unknown agent `{member}`")));
            } else if !assigned.insert(member.as_str()) {
                out.push(Violation::new(
                    format!("{path}.{coord}[{k}]"),
                    format!("agent `{member}` assigned to more than one coordinator"),
                ));
            }
        }
    }
    for agent in known_agents.difference(&assigned) {
        out.push(Violation::new(path.to_string(), format!("agent `{agent}` has no coordinator")));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference_topology() -> Scenario {
        let mut s = Scenario::new(Topology::CpuCsu);
        for k in 0..5 {
            let x = 1000.0 * k as f64;
            s.cpu_coordinators.push(Coordinator { id: format!("cpu{k}"), zone: Zone::new(x, 0.0) });
            for j in 0..3 {
                s.pus.push(PrimaryUser {
                    id: format!("pu{}", 3 * k + j),
                    zone: Zone::new(x + 10.0 * j as f64, 5.0),
                    channels: 4,
                    price: 10.0,
                    alloc_time: 60.0,
                });
            }
        }
        for k in 0..3 {
            s.csu_coordinators.push(Coordinator { id: format!("csu{k}"), zone: Zone::new(1000.0 * k as f64, 500.0) });
        }
        for i in 0..15 {
            s.sus.push(SecondaryUser {
                id: format!("su{i}"),
                zone: Zone::new(1000.0 * (i % 3) as f64, 510.0),
                channels_requested: 1,
                arrival_time: 0.0,
            });
        }
        s
    }

    #[test]
    fn reference_topology_is_valid() {
        assert_eq!(validate(&reference_topology()), vec![]);
    }

    #[test]
    fn duplicate_id_reported_once() {
        let mut s = reference_topology();
        s.sus[4].id = "pu2".into();
        let v = validate(&s);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].message.contains("pu2"));
        assert_eq!(v[0].path, "sus[4].id");
    }

    #[test]
    fn cpu_csu_needs_su_coalitions() {
        let mut s = reference_topology();
        s.csu_coordinators.clear();
        let v = validate(&s);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].path, "csu_coordinators");
    }

    #[test]
    fn reports_bad_numbers() {
        let mut s = reference_topology();
        s.weights = [0.2, 0.0, 0.3];
        s.timing.latency = -1.0;
        s.pus[0].price = f64::NAN;
        s.sus[0].channels_requested = 0;
        let paths: Vec<String> = validate(&s).into_iter().map(|v| v.path).collect();
        assert_eq!(paths, ["weights[1]", "timing.latency", "pus[0].price", "sus[0].channels_requested"]);
    }

    #[test]
    fn override_must_cover_and_reference_known_ids() {
        let mut s = reference_topology();
        let mut pus = BTreeMap::new();
        pus.insert("cpu0".to_string(), vec!["pu0".to_string(), "ghost".to_string()]);
        pus.insert("cpu9".to_string(), vec![]);
        s.memberships = Some(Memberships { pus: Some(pus), sus: None });
        let v = validate(&s);
        assert!(v.iter().any(|v| v.message.contains("ghost")));
        assert!(v.iter().any(|v| v.message.contains("cpu9")));
        assert!(v.iter().any(|v| v.message.contains("`pu1` has no coordinator")));
    }
}
