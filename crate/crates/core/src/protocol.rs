//! Negotiation messages and the agent state machines.
//!
//! Every agent is a value of [`AgentState`]. The kernel feeds it one input at
//! a time through [`handle`] (a delivered [`Message`]) or [`wake`] (a timer
//! the agent asked for); both are pure: they consume the old state and return
//! the new one together with a [`Transition`] listing what to send, when, and
//! which channel grants to commit.
//!
//! Flow in the full coalition topology:
//!
//! 1. each PU sends `ParamUpdate` to its PU coalition at t = 0;
//! 2. each SU sends `SuRequest` to its SU coalition on arrival;
//! 3. the SU coalition sends one `Cfp` per PU coalition once every member
//!    demand is in (or one `CfpSingle` per demand without aggregation);
//! 4. every PU coalition ranks its registry and answers `CpuOffer` (or
//!    `CpuNoOffer`);
//! 5. with all answers in, the SU coalition ranks the offers, assigns them to
//!    demands and sends `SuReply` to each member.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coalition::{form_coalitions, CoalitionError, Membership, ParamRegistry};
use crate::model::{Offer, Scenario, Timing, Topology, OFFER_SENSES};
use crate::topsis::{topsis, DecisionMatrix};

/// Live channel count per PU id.
pub type Capacities = BTreeMap<String, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageKind {
    ParamUpdate,
    SuRequest,
    Cfp,
    CfpSingle,
    CpuOffer,
    CpuNoOffer,
    SuReply,
}

impl MessageKind {
    pub const ALL: [MessageKind; 7] = [
        MessageKind::ParamUpdate,
        MessageKind::SuRequest,
        MessageKind::Cfp,
        MessageKind::CfpSingle,
        MessageKind::CpuOffer,
        MessageKind::CpuNoOffer,
        MessageKind::SuReply,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MessageKind::ParamUpdate => "ParamUpdate",
            MessageKind::SuRequest => "SuRequest",
            MessageKind::Cfp => "Cfp",
            MessageKind::CfpSingle => "CfpSingle",
            MessageKind::CpuOffer => "CpuOffer",
            MessageKind::CpuNoOffer => "CpuNoOffer",
            MessageKind::SuReply => "SuReply",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// One SU's channel request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub su_id: String,
    pub channels_requested: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    ParamUpdate {
        channels: u32,
        price: f64,
        alloc_time: f64,
    },
    SuRequest {
        channels_requested: u32,
    },
    /// Aggregated batch of every member demand.
    Cfp {
        demands: Vec<Demand>,
    },
    CfpSingle {
        demand: Demand,
    },
    /// `demand` names the SU whose `CfpSingle` this answers; `None` for a
    /// batch answer.
    CpuOffer {
        offer: Offer,
        demand: Option<String>,
    },
    CpuNoOffer {
        demand: Option<String>,
    },
    /// `None` is a rejection.
    SuReply {
        grant: Option<Offer>,
    },
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::ParamUpdate { .. } => MessageKind::ParamUpdate,
            Payload::SuRequest { .. } => MessageKind::SuRequest,
            Payload::Cfp { .. } => MessageKind::Cfp,
            Payload::CfpSingle { .. } => MessageKind::CfpSingle,
            Payload::CpuOffer { .. } => MessageKind::CpuOffer,
            Payload::CpuNoOffer { .. } => MessageKind::CpuNoOffer,
            Payload::SuReply { .. } => MessageKind::SuReply,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub from: String,
    pub to: String,
    pub payload: Payload,
}

impl Message {
    pub fn new(from: impl Into<String>, to: impl Into<String>, payload: Payload) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            payload,
        }
    }

    pub fn kind(&self) -> MessageKind {
        self.payload.kind()
    }
}

/// A message to emit `delay` time units after the handler runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing {
    pub message: Message,
    pub delay: f64,
}

/// A committed channel grant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub su_id: String,
    pub offer: Offer,
    pub granted_channels: u32,
}

/// Run-wide constants every handler sees.
#[derive(Debug, Clone, PartialEq)]
pub struct Env {
    pub topology: Topology,
    pub aggregation: bool,
    pub weights: [f64; 3],
    pub timing: Timing,
}

impl Env {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            topology: s.topology,
            aggregation: s.aggregation,
            weights: s.weights,
            timing: s.timing,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PuAgent {
    pub id: String,
    pub channels: u32,
    pub price: f64,
    pub alloc_time: f64,
    /// The PU coalition this PU registers with, if any.
    pub coalition: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SuPhase {
    Idle,
    Waiting,
    Served,
    Unserved,
}

impl SuPhase {
    pub fn is_terminal(&self) -> bool {
        matches!(self, SuPhase::Served | SuPhase::Unserved)
    }
}

/// Where an SU sends its request.
#[derive(Debug, Clone, PartialEq)]
pub enum SuRoute {
    /// Delegate to an SU coalition.
    ViaCoalition(String),
    /// Query each of these agents (PUs or PU coalitions) and rank locally.
    Direct(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuAgent {
    pub id: String,
    pub channels_requested: u32,
    pub arrival_time: f64,
    pub route: SuRoute,
    pub phase: SuPhase,
    pub replies: usize,
    pub offers: Vec<Offer>,
    pub grant: Option<Offer>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PuCoalitionAgent {
    pub id: String,
    pub registry: ParamRegistry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CsuPhase {
    Collecting,
    AwaitingOffers,
    Done,
}

/// Per-demand bookkeeping when aggregation is off.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingDemand {
    pub demand: Demand,
    pub replies: usize,
    pub offers: Vec<Offer>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuCoalitionAgent {
    pub id: String,
    pub members: Vec<String>,
    pub cpus: Vec<String>,
    pub aggregation: bool,
    pub phase: CsuPhase,
    /// Demands in arrival order.
    pub demands: Vec<Demand>,
    pub offers: Vec<Offer>,
    pub replies: usize,
    pub pending: BTreeMap<String, PendingDemand>,
    pub answered: usize,
}

impl SuCoalitionAgent {
    pub fn new(id: String, members: Vec<String>, cpus: Vec<String>, aggregation: bool) -> Self {
        let phase = if members.is_empty() {
            CsuPhase::Done
        } else {
            CsuPhase::Collecting
        };
        Self {
            id,
            members,
            cpus,
            aggregation,
            phase,
            demands: Vec::new(),
            offers: Vec::new(),
            replies: 0,
            pending: BTreeMap::new(),
            answered: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AgentState {
    Pu(PuAgent),
    Su(SuAgent),
    PuCoalition(PuCoalitionAgent),
    SuCoalition(SuCoalitionAgent),
}

impl AgentState {
    pub fn id(&self) -> &str {
        match self {
            AgentState::Pu(a) => &a.id,
            AgentState::Su(a) => &a.id,
            AgentState::PuCoalition(a) => &a.id,
            AgentState::SuCoalition(a) => &a.id,
        }
    }
}

/// Side effects of one handler invocation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transition {
    pub outbox: Vec<Outgoing>,
    /// Ask the kernel for an `AgentWake` after this delay.
    pub wake_after: Option<f64>,
    pub allocations: Vec<Allocation>,
    pub violation: Option<String>,
}

impl Transition {
    fn violation(msg: impl Into<String>) -> Self {
        Self {
            violation: Some(msg.into()),
            ..Self::default()
        }
    }

    fn send(&mut self, from: &str, to: &str, payload: Payload, delay: f64) {
        self.outbox.push(Outgoing {
            message: Message::new(from, to, payload),
            delay,
        });
    }
}

/// Orders offers by TOPSIS closeness over (channels, price, alloc_time),
/// best first.
pub fn rank_offers(offers: &[Offer], weights: &[f64; 3]) -> Vec<Offer> {
    if offers.is_empty() {
        return Vec::new();
    }
    let matrix = DecisionMatrix::new(
        offers.iter().map(|o| o.pu_id.clone()).collect(),
        vec!["channels".into(), "price".into(), "alloc_time".into()],
        offers.iter().map(|o| o.criteria().to_vec()).collect(),
        weights.to_vec(),
        OFFER_SENSES.to_vec(),
    )
    .expect("offer criteria are finite and weights validated");
    topsis(&matrix)
        .expect("offer matrix is well-formed")
        .ranking
        .into_iter()
        .map(|i| offers[i].clone())
        .collect()
}

/// Walks the demands in order; each takes the best-ranked unused offer whose
/// PU still has enough channels. Returns the grants and the ids of demands
/// nothing could satisfy.
pub fn assign_offers(
    ranked: &[Offer],
    demands: &[Demand],
    capacities: &Capacities,
) -> (Vec<Allocation>, Vec<String>) {
    let mut remaining = capacities.clone();
    let mut consumed = vec![false; ranked.len()];
    let mut allocations = Vec::new();
    let mut unserved = Vec::new();
    for demand in demands {
        let pick = ranked.iter().enumerate().position(|(i, offer)| {
            !consumed[i]
                && remaining
                    .get(&offer.pu_id)
                    .is_some_and(|&cap| cap >= demand.channels_requested)
        });
        match pick {
            Some(i) => {
                consumed[i] = true;
                let offer = &ranked[i];
                if let Some(cap) = remaining.get_mut(&offer.pu_id) {
                    *cap -= demand.channels_requested;
                }
                allocations.push(Allocation {
                    su_id: demand.su_id.clone(),
                    offer: offer.clone(),
                    granted_channels: demand.channels_requested,
                });
            }
            None => unserved.push(demand.su_id.clone()),
        }
    }
    (allocations, unserved)
}

/// Delivers one message to `state`.
pub fn handle(
    state: AgentState,
    msg: &Message,
    now: f64,
    env: &Env,
    capacities: &Capacities,
) -> (AgentState, Transition) {
    match state {
        AgentState::Pu(pu) => {
            let t = pu_handle(&pu, msg, env, capacities);
            (AgentState::Pu(pu), t)
        }
        AgentState::Su(su) => {
            let (su, t) = su_handle(su, msg, env);
            (AgentState::Su(su), t)
        }
        AgentState::PuCoalition(cpu) => {
            let (cpu, t) = cpu_handle(cpu, msg, now, env);
            (AgentState::PuCoalition(cpu), t)
        }
        AgentState::SuCoalition(csu) => {
            let (csu, t) = csu_handle(csu, msg, env, capacities);
            (AgentState::SuCoalition(csu), t)
        }
    }
}

/// Fires a timer on `state`.
pub fn wake(state: AgentState, _now: f64, env: &Env, capacities: &Capacities) -> (AgentState, Transition) {
    match state {
        AgentState::Pu(pu) => {
            let mut t = Transition::default();
            match &pu.coalition {
                Some(cpu) => t.send(
                    &pu.id,
                    cpu,
                    Payload::ParamUpdate {
                        channels: capacities.get(&pu.id).copied().unwrap_or(pu.channels),
                        price: pu.price,
                        alloc_time: pu.alloc_time,
                    },
                    0.0,
                ),
                None => t.violation = Some(format!("{} has no coalition to register with", pu.id)),
            }
            (AgentState::Pu(pu), t)
        }
        AgentState::Su(su) => {
            let (su, t) = su_wake(su, env, capacities);
            (AgentState::Su(su), t)
        }
        other => {
            let t = Transition::violation(format!("{} does not take timers", other.id()));
            (other, t)
        }
    }
}

fn pu_handle(pu: &PuAgent, msg: &Message, env: &Env, capacities: &Capacities) -> Transition {
    match &msg.payload {
        Payload::CfpSingle { demand } => {
            let mut t = Transition::default();
            let channels = capacities.get(&pu.id).copied().unwrap_or(0);
            let payload = if channels > 0 {
                Payload::CpuOffer {
                    offer: Offer {
                        pu_id: pu.id.clone(),
                        cpu_id: pu.id.clone(),
                        channels,
                        price: pu.price,
                        alloc_time: pu.alloc_time,
                    },
                    demand: Some(demand.su_id.clone()),
                }
            } else {
                Payload::CpuNoOffer {
                    demand: Some(demand.su_id.clone()),
                }
            };
            t.send(&pu.id, &msg.from, payload, env.timing.pu_reply);
            t
        }
        other => Transition::violation(format!("{} cannot handle {}", pu.id, other.kind())),
    }
}

fn su_wake(mut su: SuAgent, env: &Env, capacities: &Capacities) -> (SuAgent, Transition) {
    let mut t = Transition::default();
    match su.phase {
        SuPhase::Idle => match &su.route {
            SuRoute::ViaCoalition(csu) => {
                t.send(
                    &su.id,
                    csu,
                    Payload::SuRequest {
                        channels_requested: su.channels_requested,
                    },
                    0.0,
                );
                su.phase = SuPhase::Waiting;
            }
            SuRoute::Direct(targets) if targets.is_empty() => su.phase = SuPhase::Unserved,
            SuRoute::Direct(targets) => {
                let demand = Demand {
                    su_id: su.id.clone(),
                    channels_requested: su.channels_requested,
                };
                for target in targets {
                    t.send(&su.id, target, Payload::CfpSingle { demand: demand.clone() }, 0.0);
                }
                su.phase = SuPhase::Waiting;
            }
        },
        SuPhase::Waiting => match &su.route {
            SuRoute::Direct(targets) if su.replies == targets.len() => {
                let ranked = rank_offers(&su.offers, &env.weights);
                let demand = Demand {
                    su_id: su.id.clone(),
                    channels_requested: su.channels_requested,
                };
                let (mut allocations, _) = assign_offers(&ranked, &[demand], capacities);
                match allocations.pop() {
                    Some(a) => {
                        su.grant = Some(a.offer.clone());
                        su.phase = SuPhase::Served;
                        t.allocations.push(a);
                    }
                    None => su.phase = SuPhase::Unserved,
                }
            }
            _ => t.violation = Some(format!("{} woke while still waiting for replies", su.id)),
        },
        SuPhase::Served | SuPhase::Unserved => {
            t.violation = Some(format!("{} woke in terminal phase {:?}", su.id, su.phase));
        }
    }
    (su, t)
}

fn su_handle(mut su: SuAgent, msg: &Message, env: &Env) -> (SuAgent, Transition) {
    if su.phase != SuPhase::Waiting {
        let t = Transition::violation(format!("{} received {} in phase {:?}", su.id, msg.kind(), su.phase));
        return (su, t);
    }
    let mut t = Transition::default();
    match (&su.route, &msg.payload) {
        (SuRoute::ViaCoalition(csu), Payload::SuReply { grant }) if *csu == msg.from => {
            su.grant = grant.clone();
            su.phase = if grant.is_some() {
                SuPhase::Served
            } else {
                SuPhase::Unserved
            };
        }
        (SuRoute::Direct(targets), Payload::CpuOffer { .. } | Payload::CpuNoOffer { .. })
            if targets.contains(&msg.from) && su.replies < targets.len() =>
        {
            su.replies += 1;
            if let Payload::CpuOffer { offer, .. } = &msg.payload {
                su.offers.push(offer.clone());
            }
            if su.replies == targets.len() {
                t.wake_after = Some(env.timing.rank_per_offer * su.offers.len() as f64);
            }
        }
        _ => {
            t.violation = Some(format!("{} received unexpected {} from {}", su.id, msg.kind(), msg.from));
        }
    }
    (su, t)
}

fn cpu_handle(mut cpu: PuCoalitionAgent, msg: &Message, now: f64, env: &Env) -> (PuCoalitionAgent, Transition) {
    let mut t = Transition::default();
    let answer_to = match &msg.payload {
        Payload::ParamUpdate {
            channels,
            price,
            alloc_time,
        } => {
            if let Err(e) = cpu.registry.register(&msg.from, *channels, *price, *alloc_time, now) {
                t.violation = Some(e.to_string());
            }
            return (cpu, t);
        }
        Payload::Cfp { .. } => None,
        Payload::CfpSingle { demand } => Some(demand.su_id.clone()),
        other => {
            t.violation = Some(format!("{} cannot handle {}", cpu.id, other.kind()));
            return (cpu, t);
        }
    };
    let payload = match cpu.registry.best_offer(&env.weights) {
        Some(offer) => Payload::CpuOffer {
            offer,
            demand: answer_to,
        },
        None => Payload::CpuNoOffer { demand: answer_to },
    };
    t.send(&cpu.id, &msg.from, payload, env.timing.cpu_select);
    (cpu, t)
}

fn csu_handle(
    mut csu: SuCoalitionAgent,
    msg: &Message,
    env: &Env,
    capacities: &Capacities,
) -> (SuCoalitionAgent, Transition) {
    if csu.phase == CsuPhase::Done {
        let t = Transition::violation(format!("{} received {} after finishing", csu.id, msg.kind()));
        return (csu, t);
    }
    let mut t = Transition::default();
    match &msg.payload {
        Payload::SuRequest { channels_requested } => {
            let known = csu.members.binary_search(&msg.from).is_ok();
            let repeat = csu.demands.iter().any(|d| d.su_id == msg.from);
            if !known || repeat || csu.phase != CsuPhase::Collecting {
                t.violation = Some(format!("{} rejected request from {}", csu.id, msg.from));
                return (csu, t);
            }
            let demand = Demand {
                su_id: msg.from.clone(),
                channels_requested: *channels_requested,
            };
            csu.demands.push(demand.clone());
            let complete = csu.demands.len() == csu.members.len();
            if csu.aggregation {
                if complete {
                    let delay = env.timing.agg_per_demand * csu.demands.len() as f64;
                    for cpu in &csu.cpus {
                        t.send(
                            &csu.id,
                            cpu,
                            Payload::Cfp {
                                demands: csu.demands.clone(),
                            },
                            delay,
                        );
                    }
                }
            } else {
                for cpu in &csu.cpus {
                    t.send(
                        &csu.id,
                        cpu,
                        Payload::CfpSingle { demand: demand.clone() },
                        env.timing.agg_per_demand,
                    );
                }
                csu.pending.insert(
                    demand.su_id.clone(),
                    PendingDemand {
                        demand,
                        replies: 0,
                        offers: Vec::new(),
                    },
                );
            }
            if complete {
                csu.phase = CsuPhase::AwaitingOffers;
            }
        }
        Payload::CpuOffer { demand, .. } | Payload::CpuNoOffer { demand } => {
            if !csu.cpus.contains(&msg.from) {
                t.violation = Some(format!("{} got an answer from unknown {}", csu.id, msg.from));
                return (csu, t);
            }
            let offer = match &msg.payload {
                Payload::CpuOffer { offer, .. } => Some(offer.clone()),
                _ => None,
            };
            if csu.aggregation {
                if csu.phase != CsuPhase::AwaitingOffers || demand.is_some() || csu.replies == csu.cpus.len() {
                    t.violation = Some(format!("{} got an unexpected {}", csu.id, msg.kind()));
                    return (csu, t);
                }
                csu.replies += 1;
                csu.offers.extend(offer);
                if csu.replies == csu.cpus.len() {
                    let ranked = rank_offers(&csu.offers, &env.weights);
                    let delay = env.timing.rank_per_offer * csu.offers.len() as f64;
                    reply_to_demands(&csu.id, &ranked, &csu.demands, capacities, delay, &mut t);
                    csu.phase = CsuPhase::Done;
                }
            } else {
                let Some(entry) = demand.as_ref().and_then(|su| csu.pending.get_mut(su)) else {
                    t.violation = Some(format!("{} got {} for no pending demand", csu.id, msg.kind()));
                    return (csu, t);
                };
                entry.replies += 1;
                entry.offers.extend(offer);
                if entry.replies == csu.cpus.len() {
                    let entry = csu
                        .pending
                        .remove(demand.as_deref().expect("checked above"))
                        .expect("entry exists");
                    let ranked = rank_offers(&entry.offers, &env.weights);
                    let delay = env.timing.rank_per_offer * entry.offers.len() as f64;
                    reply_to_demands(&csu.id, &ranked, &[entry.demand], capacities, delay, &mut t);
                    csu.answered += 1;
                    if csu.answered == csu.members.len() {
                        csu.phase = CsuPhase::Done;
                    }
                }
            }
        }
        other => {
            t.violation = Some(format!("{} cannot handle {}", csu.id, other.kind()));
        }
    }
    (csu, t)
}

fn reply_to_demands(
    from: &str,
    ranked: &[Offer],
    demands: &[Demand],
    capacities: &Capacities,
    delay: f64,
    t: &mut Transition,
) {
    let (allocations, _) = assign_offers(ranked, demands, capacities);
    for demand in demands {
        let grant = allocations
            .iter()
            .find(|a| a.su_id == demand.su_id)
            .map(|a| a.offer.clone());
        t.send(from, &demand.su_id, Payload::SuReply { grant }, delay);
    }
    t.allocations.extend(allocations);
}

/// Who talks to whom in a scenario, and every agent's initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyPlan {
    pub topology: Topology,
    pub aggregation: bool,
    pub pu_coalitions: Option<Membership>,
    pub su_coalitions: Option<Membership>,
    pub agents: BTreeMap<String, AgentState>,
}

/// Forms the coalitions the topology calls for and builds the agents.
pub fn topology_plan(scenario: &Scenario) -> Result<TopologyPlan, CoalitionError> {
    let topology = scenario.topology;
    let pu_coalitions = match topology {
        Topology::NoCoalition => None,
        Topology::CpuOnly | Topology::CpuCsu => Some(form_coalitions(
            scenario.pus.iter().map(|p| (p.id.as_str(), p.zone)),
            &scenario.cpu_coordinators,
            scenario.pu_override(),
        )?),
    };
    let su_coalitions = match topology {
        Topology::CpuCsu => Some(form_coalitions(
            scenario.sus.iter().map(|s| (s.id.as_str(), s.zone)),
            &scenario.csu_coordinators,
            scenario.su_override(),
        )?),
        _ => None,
    };

    let mut agents = BTreeMap::new();
    let pu_home = pu_coalitions.as_ref().map(Membership::by_agent).unwrap_or_default();
    for pu in &scenario.pus {
        agents.insert(
            pu.id.clone(),
            AgentState::Pu(PuAgent {
                id: pu.id.clone(),
                channels: pu.channels,
                price: pu.price,
                alloc_time: pu.alloc_time,
                coalition: pu_home.get(pu.id.as_str()).map(|c| (*c).to_string()),
            }),
        );
    }
    let cpu_ids: Vec<String> = scenario.cpu_coordinators.iter().map(|c| c.id.clone()).collect();
    if let Some(m) = &pu_coalitions {
        for id in &cpu_ids {
            agents.insert(
                id.clone(),
                AgentState::PuCoalition(PuCoalitionAgent {
                    id: id.clone(),
                    registry: ParamRegistry::new(id.clone(), m.members(id).iter().cloned()),
                }),
            );
        }
    }
    let su_home = su_coalitions.as_ref().map(Membership::by_agent).unwrap_or_default();
    if let Some(m) = &su_coalitions {
        for c in &scenario.csu_coordinators {
            agents.insert(
                c.id.clone(),
                AgentState::SuCoalition(SuCoalitionAgent::new(
                    c.id.clone(),
                    m.members(&c.id).to_vec(),
                    cpu_ids.clone(),
                    scenario.aggregation,
                )),
            );
        }
    }
    for su in &scenario.sus {
        let route = match topology {
            Topology::NoCoalition => SuRoute::Direct(scenario.pus.iter().map(|p| p.id.clone()).collect()),
            Topology::CpuOnly => SuRoute::Direct(cpu_ids.clone()),
            Topology::CpuCsu => SuRoute::ViaCoalition(
                su_home
                    .get(su.id.as_str())
                    .map(|c| (*c).to_string())
                    .ok_or_else(|| CoalitionError::Unassigned(su.id.clone()))?,
            ),
        };
        agents.insert(
            su.id.clone(),
            AgentState::Su(SuAgent {
                id: su.id.clone(),
                channels_requested: su.channels_requested,
                arrival_time: su.arrival_time,
                route,
                phase: SuPhase::Idle,
                replies: 0,
                offers: Vec::new(),
                grant: None,
            }),
        );
    }

    Ok(TopologyPlan {
        topology,
        aggregation: scenario.aggregation,
        pu_coalitions,
        su_coalitions,
        agents,
    })
}
