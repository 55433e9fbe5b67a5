//! Geographic coalition formation and the PU-coalition parameter registry.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{Coordinator, Offer, Zone, OFFER_SENSES};
use crate::topsis::{topsis, DecisionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoalitionError {
    #[error("no coordinators to assign agents to")]
    NoCoordinators,
    #[error("membership override names unknown coordinator `{0}`")]
    UnknownCoordinator(String),
    #[error("membership override names unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{0}` appears under more than one coordinator")]
    DuplicateMember(String),
    #[error("agent `{0}` is not assigned to any coordinator")]
    Unassigned(String),
    #[error("`{pu}` is not a member of coalition `{coordinator}`")]
    NotAMember { coordinator: String, pu: String },
}

/// Coordinator id → sorted member ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Membership {
    groups: BTreeMap<String, Vec<String>>,
}

impl Membership {
    pub fn members(&self, coordinator: &str) -> &[String] {
        self.groups.get(coordinator).map_or(&[], Vec::as_slice)
    }

    pub fn coordinator_of(&self, agent: &str) -> Option<&str> {
        self.groups
            .iter()
            .find(|(_, members)| members.binary_search_by(|m| m.as_str().cmp(agent)).is_ok())
            .map(|(c, _)| c.as_str())
    }

    /// Agent id → coordinator id, for every assigned agent.
    pub fn by_agent(&self) -> BTreeMap<&str, &str> {
        self.groups
            .iter()
            .flat_map(|(c, members)| members.iter().map(move |m| (m.as_str(), c.as_str())))
            .collect()
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }
}

/// Assigns each agent to its nearest coordinator (ties go to the smaller
/// coordinator id). An override map, when given, is used as-is after
/// checking that it names only known ids and covers every agent once.
pub fn form_coalitions<'a>(
    agents: impl IntoIterator<Item = (&'a str, Zone)>,
    coordinators: &[Coordinator],
    override_map: Option<&BTreeMap<String, Vec<String>>>,
) -> Result<Membership, CoalitionError> {
    let agents: Vec<(&str, Zone)> = agents.into_iter().collect();
    let mut groups: BTreeMap<String, Vec<String>> = coordinators
        .iter()
        .map(|c| (c.id.clone(), Vec::new()))
        .collect();

    if let Some(map) = override_map {
        let known: BTreeSet<&str> = agents.iter().map(|(id, _)| *id).collect();
        let mut seen = BTreeSet::new();
        for (coord, members) in map {
            let slot = groups
                .get_mut(coord)
                .ok_or_else(|| CoalitionError::UnknownCoordinator(coord.clone()))?;
            for m in members {
                if !known.contains(m.as_str()) {
                    return Err(CoalitionError::UnknownAgent(m.clone()));
                }
                if !seen.insert(m.as_str()) {
                    return Err(CoalitionError::DuplicateMember(m.clone()));
                }
                slot.push(m.clone());
            }
        }
        if let Some(missing) = known.difference(&seen).next() {
            return Err(CoalitionError::Unassigned((*missing).to_string()));
        }
    } else {
        if coordinators.is_empty() && !agents.is_empty() {
            return Err(CoalitionError::NoCoordinators);
        }
        for (id, zone) in &agents {
            let nearest = coordinators
                .iter()
                .min_by(|a, b| {
                    zone.distance_sq(&a.zone)
                        .total_cmp(&zone.distance_sq(&b.zone))
                        .then_with(|| a.id.cmp(&b.id))
                })
                .expect("coordinators is non-empty");
            groups
                .get_mut(&nearest.id)
                .expect("every coordinator has a slot")
                .push((*id).to_string());
        }
    }

    for members in groups.values_mut() {
        members.sort();
    }
    Ok(Membership { groups })
}

/// Latest known parameters of one PU.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamEntry {
    pub channels: u32,
    pub price: f64,
    pub alloc_time: f64,
    pub last_update: f64,
}

/// Live view of a PU coalition's members, keyed by PU id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamRegistry {
    coordinator: String,
    #[serde(skip)]
    members: BTreeSet<String>,
    entries: BTreeMap<String, ParamEntry>,
}

impl ParamRegistry {
    pub fn new(coordinator: impl Into<String>, members: impl IntoIterator<Item = String>) -> Self {
        Self {
            coordinator: coordinator.into(),
            members: members.into_iter().collect(),
            entries: BTreeMap::new(),
        }
    }

    pub fn coordinator(&self) -> &str {
        &self.coordinator
    }

    pub fn is_member(&self, pu_id: &str) -> bool {
        self.members.contains(pu_id)
    }

    pub fn get(&self, pu_id: &str) -> Option<&ParamEntry> {
        self.entries.get(pu_id)
    }

    pub fn entries(&self) -> &BTreeMap<String, ParamEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Replaces the entry for `pu_id`.
    pub fn register(
        &mut self,
        pu_id: &str,
        channels: u32,
        price: f64,
        alloc_time: f64,
        now: f64,
    ) -> Result<(), CoalitionError> {
        if !self.members.contains(pu_id) {
            return Err(CoalitionError::NotAMember {
                coordinator: self.coordinator.clone(),
                pu: pu_id.to_string(),
            });
        }
        self.entries.insert(
            pu_id.to_string(),
            ParamEntry {
                channels,
                price,
                alloc_time,
                last_update: now,
            },
        );
        Ok(())
    }

    /// Ranks the members that still have channels and returns the TOPSIS
    /// winner's terms, or `None` when no member can offer anything.
    pub fn best_offer(&self, weights: &[f64; 3]) -> Option<Offer> {
        let candidates: Vec<(&String, &ParamEntry)> =
            self.entries.iter().filter(|(_, e)| e.channels > 0).collect();
        if candidates.is_empty() {
            return None;
        }
        let scores = candidates
            .iter()
            .map(|(_, e)| vec![f64::from(e.channels), e.price, e.alloc_time])
            .collect();
        let matrix = DecisionMatrix::new(
            candidates.iter().map(|(id, _)| (*id).clone()).collect(),
            vec!["channels".into(), "price".into(), "alloc_time".into()],
            scores,
            weights.to_vec(),
            OFFER_SENSES.to_vec(),
        )
        .ok()?;
        let winner = topsis(&matrix).ok()?.best();
        let (pu_id, entry) = candidates[winner];
        Some(Offer {
            pu_id: pu_id.clone(),
            cpu_id: self.coordinator.clone(),
            channels: entry.channels,
            price: entry.price,
            alloc_time: entry.alloc_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_WEIGHTS;

    fn coord(id: &str, x: f64, y: f64) -> Coordinator {
        Coordinator { id: id.into(), zone: Zone::new(x, y) }
    }

    #[test]
    fn nearest_coordinator_wins() {
        let m = form_coalitions([("a", Zone::new(0.0, 0.0))], &[coord("A", 1.0, 0.0), coord("B", 5.0, 0.0)], None)
            .unwrap();
        assert_eq!(m.members("A"), ["a"]);
        assert!(m.members("B").is_empty());
    }

    #[test]
    fn equidistant_goes_to_lower_id() {
        let coords = [coord("B", 1.0, 0.0), coord("A", -1.0, 0.0)];
        let m = form_coalitions([("a", Zone::new(0.0, 0.0))], &coords, None).unwrap();
        assert_eq!(m.coordinator_of("a"), Some("A"));
    }

    #[test]
    fn three_per_zone() {
        let coords: Vec<_> = (0..5).map(|k| coord(&format!("cpu{k}"), 100.0 * k as f64, 0.0)).collect();
        let ids: Vec<String> = (0..15).map(|i| format!("pu{i:02}")).collect();
        let agents = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), Zone::new(100.0 * (i / 3) as f64 + (i % 3) as f64, 3.0)));
        let m = form_coalitions(agents, &coords, None).unwrap();
        for c in &coords {
            assert_eq!(m.members(&c.id).len(), 3);
        }
        assert_eq!(m.members("cpu1"), ["pu03", "pu04", "pu05"]);
    }

    #[test]
    fn override_is_used_verbatim_but_checked() {
        let coords = [coord("A", 0.0, 0.0), coord("B", 9.0, 0.0)];
        let agents = [("x", Zone::new(0.0, 0.0)), ("y", Zone::new(0.0, 0.0))];
        let mut map = BTreeMap::new();
        map.insert("B".to_string(), vec!["y".to_string(), "x".to_string()]);
        let m = form_coalitions(agents, &coords, Some(&map)).unwrap();
        assert_eq!(m.members("B"), ["x", "y"]);

        map.insert("C".to_string(), vec![]);
        assert_eq!(
            form_coalitions(agents, &coords, Some(&map)),
            Err(CoalitionError::UnknownCoordinator("C".into()))
        );
        map.remove("C");
        map.insert("A".to_string(), vec!["z".to_string()]);
        assert_eq!(
            form_coalitions(agents, &coords, Some(&map)),
            Err(CoalitionError::UnknownAgent("z".into()))
        );
    }

    #[test]
    fn no_coordinators_is_an_error() {
        assert_eq!(
            form_coalitions([("a", Zone::default())], &[], None),
            Err(CoalitionError::NoCoordinators)
        );
    }

    #[test]
    fn register_then_read() {
        let mut reg = ParamRegistry::new("cpu0", ["pu3".to_string()]);
        reg.register("pu3", 4, 10.0, 60.0, 0.0).unwrap();
        assert_eq!(
            reg.get("pu3"),
            Some(&ParamEntry { channels: 4, price: 10.0, alloc_time: 60.0, last_update: 0.0 })
        );
        reg.register("pu3", 2, 11.0, 30.0, 7.5).unwrap();
        assert_eq!(reg.get("pu3").unwrap().channels, 2);
        assert_eq!(reg.get("pu3").unwrap().last_update, 7.5);
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn register_rejects_non_member() {
        let mut reg = ParamRegistry::new("cpu0", ["pu3".to_string()]);
        assert!(matches!(
            reg.register("pu4", 4, 10.0, 60.0, 0.0),
            Err(CoalitionError::NotAMember { .. })
        ));
    }

    fn registry(rows: &[(u32, f64, f64)]) -> ParamRegistry {
        let ids: Vec<String> = (0..rows.len()).map(|i| format!("pu{i}")).collect();
        let mut reg = ParamRegistry::new("cpu", ids.clone());
        for (id, &(ch, p, t)) in ids.iter().zip(rows) {
            reg.register(id, ch, p, t, 0.0).unwrap();
        }
        reg
    }

    #[test]
    fn cheapest_wins_when_only_price_differs() {
        let reg = registry(&[(4, 10.0, 60.0), (4, 8.0, 60.0), (4, 12.0, 60.0)]);
        assert_eq!(reg.best_offer(&DEFAULT_WEIGHTS).unwrap().pu_id, "pu1");
    }

    #[test]
    fn single_member_offer() {
        let reg = registry(&[(2, 10.0, 60.0)]);
        let offer = reg.best_offer(&DEFAULT_WEIGHTS).unwrap();
        assert_eq!(offer.pu_id, "pu0");
        assert_eq!(offer.cpu_id, "cpu");
        assert_eq!(offer.channels, 2);
    }

    #[test]
    fn zero_channel_members_never_win() {
        let reg = registry(&[(0, 1.0, 500.0), (1, 20.0, 10.0)]);
        assert_eq!(reg.best_offer(&DEFAULT_WEIGHTS).unwrap().pu_id, "pu1");
        let reg = registry(&[(0, 1.0, 500.0), (0, 2.0, 10.0)]);
        assert_eq!(reg.best_offer(&DEFAULT_WEIGHTS), None);
        assert_eq!(ParamRegistry::new("cpu", Vec::new()).best_offer(&DEFAULT_WEIGHTS), None);
    }
}
