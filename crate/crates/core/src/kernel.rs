//! Deterministic discrete-event kernel.
//!
//! Events are ordered by `(time, seq)` where `seq` is a global insertion
//! counter, so equal-time events dispatch in the order they were scheduled.
//! Every message is delivered exactly `latency` after it is emitted; a
//! handler's send-delay moves the emission, never the transport time.
//! Nothing in dispatch touches wall-clock time, randomness or unordered maps.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;
use thiserror::Error;

use crate::coalition::{CoalitionError, ParamRegistry};
use crate::model::{validate, Scenario, Violation};
use crate::protocol::{
    self, topology_plan, AgentState, Allocation, Capacities, Env, Message, MessageKind, Transition,
};

pub const DEFAULT_EVENT_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("scenario is invalid: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Coalition(#[from] CoalitionError),
    #[error("event for unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("step called on an empty event queue")]
    EmptyQueue,
    #[error("run did not quiesce within {cap} events (clock at {time})")]
    EventCapExceeded { cap: u64, time: f64 },
    #[error("grant to {su} would take PU {pu} below zero channels")]
    CapacityUnderflow { pu: String, su: String },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Deliver(Message),
    AgentWake(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventTag {
    Deliver,
    AgentWake,
}

/// One dispatched event as it appears in the log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoggedEvent {
    pub time: f64,
    pub seq: u64,
    pub kind: EventTag,
    pub from: Option<String>,
    pub to: String,
    pub payload_kind: Option<MessageKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MessageCounts {
    pub per_kind: BTreeMap<MessageKind, u64>,
    pub total: u64,
}

impl MessageCounts {
    pub fn get(&self, kind: MessageKind) -> u64 {
        self.per_kind.get(&kind).copied().unwrap_or(0)
    }

    fn record(&mut self, kind: MessageKind) {
        *self.per_kind.entry(kind).or_default() += 1;
        self.total += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AgentTraffic {
    pub sent: u64,
    pub received: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SuResponse {
    /// Time from the SU's arrival to its grant.
    Served(f64),
    Unserved,
}

impl SuResponse {
    pub fn time(&self) -> Option<f64> {
        match self {
            SuResponse::Served(t) => Some(*t),
            SuResponse::Unserved => None,
        }
    }
}

/// Everything observed during one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub event_log: Vec<LoggedEvent>,
    /// Delivered messages.
    pub msg_counts: MessageCounts,
    pub sent_messages: u64,
    pub per_agent: BTreeMap<String, AgentTraffic>,
    pub per_su_response: BTreeMap<String, SuResponse>,
    /// Last SU reply (or local decision) minus the earliest SU arrival.
    pub run_response: Option<f64>,
    pub allocations: Vec<Allocation>,
    pub quiescent_at: f64,
    pub initial_capacity: Capacities,
    pub final_capacity: Capacities,
    pub registries: BTreeMap<String, ParamRegistry>,
    pub violations: Vec<String>,
}

impl RunReport {
    pub fn served(&self) -> usize {
        self.per_su_response
            .values()
            .filter(|r| matches!(r, SuResponse::Served(_)))
            .count()
    }
}

/// The full simulation state: agents, pending events, clock and counters.
#[derive(Debug, Clone)]
pub struct World {
    env: Env,
    agents: BTreeMap<String, AgentState>,
    queue: BinaryHeap<Reverse<SimEvent>>,
    clock: f64,
    next_seq: u64,
    capacities: Capacities,
    initial_capacity: Capacities,
    log: Vec<LoggedEvent>,
    counts: MessageCounts,
    sent: u64,
    per_agent: BTreeMap<String, AgentTraffic>,
    su_done_at: BTreeMap<String, f64>,
    allocations: Vec<Allocation>,
    violations: Vec<String>,
}

impl World {
    /// An empty world over the given agents; nothing is scheduled.
    pub fn from_parts(env: Env, agents: BTreeMap<String, AgentState>, capacities: Capacities) -> Self {
        Self {
            env,
            agents,
            queue: BinaryHeap::new(),
            clock: 0.0,
            next_seq: 0,
            initial_capacity: capacities.clone(),
            capacities,
            log: Vec::new(),
            counts: MessageCounts::default(),
            sent: 0,
            per_agent: BTreeMap::new(),
            su_done_at: BTreeMap::new(),
            allocations: Vec::new(),
            violations: Vec::new(),
        }
    }

    /// Builds the agents for `scenario` and seeds PU registration at t = 0
    /// and each SU's arrival.
    pub fn new(scenario: &Scenario) -> Result<Self, SimError> {
        let violations = validate(scenario);
        if !violations.is_empty() {
            return Err(SimError::Invalid(violations));
        }
        let plan = topology_plan(scenario)?;
        let capacities = scenario.pus.iter().map(|p| (p.id.clone(), p.channels)).collect();
        let mut world = Self::from_parts(Env::from_scenario(scenario), plan.agents, capacities);
        for pu in &scenario.pus {
            if let Some(AgentState::Pu(agent)) = world.agents.get(&pu.id) {
                if agent.coalition.is_some() {
                    world.schedule(0.0, EventKind::AgentWake(pu.id.clone()));
                }
            }
        }
        for su in &scenario.sus {
            world.schedule(su.arrival_time, EventKind::AgentWake(su.id.clone()));
        }
        Ok(world)
    }

    pub fn schedule(&mut self, time: f64, kind: EventKind) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(SimEvent { time, seq, kind }));
        seq
    }

    pub fn now(&self) -> f64 {
        self.clock
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn is_quiescent(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn log(&self) -> &[LoggedEvent] {
        &self.log
    }

    pub fn agent(&self, id: &str) -> Option<&AgentState> {
        self.agents.get(id)
    }

    pub fn capacities(&self) -> &Capacities {
        &self.capacities
    }

    /// Dispatches the earliest pending event.
    pub fn step(&mut self) -> Result<(), SimError> {
        let Reverse(event) = self.queue.pop().ok_or(SimError::EmptyQueue)?;
        debug_assert!(event.time >= self.clock);
        self.clock = event.time;
        let now = event.time;

        let (target, entry) = match &event.kind {
            EventKind::Deliver(msg) => (
                msg.to.clone(),
                LoggedEvent {
                    time: now,
                    seq: event.seq,
                    kind: EventTag::Deliver,
                    from: Some(msg.from.clone()),
                    to: msg.to.clone(),
                    payload_kind: Some(msg.kind()),
                    violation: None,
                },
            ),
            EventKind::AgentWake(id) => (
                id.clone(),
                LoggedEvent {
                    time: now,
                    seq: event.seq,
                    kind: EventTag::AgentWake,
                    from: None,
                    to: id.clone(),
                    payload_kind: None,
                    violation: None,
                },
            ),
        };
        let state = self
            .agents
            .remove(&target)
            .ok_or_else(|| SimError::UnknownAgent(target.clone()))?;

        let (next, transition) = match &event.kind {
            EventKind::Deliver(msg) => {
                self.counts.record(msg.kind());
                self.per_agent.entry(target.clone()).or_default().received += 1;
                protocol::handle(state, msg, now, &self.env, &self.capacities)
            }
            EventKind::AgentWake(_) => protocol::wake(state, now, &self.env, &self.capacities),
        };
        if let AgentState::Su(su) = &next {
            if su.phase.is_terminal() && !self.su_done_at.contains_key(&su.id) {
                self.su_done_at.insert(su.id.clone(), now);
            }
        }
        self.agents.insert(target, next);
        self.log.push(entry);
        self.apply(transition, now)
    }

    fn apply(&mut self, t: Transition, now: f64) -> Result<(), SimError> {
        if let Some(v) = t.violation {
            self.violations.push(format!("t={now}: {v}"));
            if let Some(last) = self.log.last_mut() {
                last.violation = Some(v);
            }
        }
        for a in t.allocations {
            let cap = self.capacities.get_mut(&a.offer.pu_id);
            match cap {
                Some(c) if *c >= a.granted_channels => *c -= a.granted_channels,
                _ => {
                    return Err(SimError::CapacityUnderflow {
                        pu: a.offer.pu_id.clone(),
                        su: a.su_id.clone(),
                    })
                }
            }
            self.allocations.push(a);
        }
        for out in t.outbox {
            self.sent += 1;
            self.per_agent.entry(out.message.from.clone()).or_default().sent += 1;
            let at = now + out.delay + self.env.timing.latency;
            self.schedule(at, EventKind::Deliver(out.message));
        }
        if let Some(delay) = t.wake_after {
            let id = self.log.last().map(|e| e.to.clone()).expect("just logged");
            self.schedule(now + delay, EventKind::AgentWake(id));
        }
        Ok(())
    }

    /// Steps until the queue drains or `cap` events have been dispatched.
    pub fn run_to_quiescence(mut self, cap: u64) -> Result<RunReport, SimError> {
        let mut dispatched = 0u64;
        while !self.queue.is_empty() {
            if dispatched >= cap {
                return Err(SimError::EventCapExceeded { cap, time: self.clock });
            }
            self.step()?;
            dispatched += 1;
        }
        Ok(self.into_report())
    }

    pub fn into_report(self) -> RunReport {
        let mut per_su_response = BTreeMap::new();
        let mut earliest: Option<f64> = None;
        let mut latest: Option<f64> = None;
        for state in self.agents.values() {
            let AgentState::Su(su) = state else { continue };
            earliest = Some(earliest.map_or(su.arrival_time, |e: f64| e.min(su.arrival_time)));
            let done = self.su_done_at.get(&su.id).copied();
            if let Some(t) = done {
                latest = Some(latest.map_or(t, |l: f64| l.max(t)));
            }
            let response = match (su.grant.is_some(), done) {
                (true, Some(t)) => SuResponse::Served(t - su.arrival_time),
                _ => SuResponse::Unserved,
            };
            per_su_response.insert(su.id.clone(), response);
        }
        let run_response = match (earliest, latest) {
            (Some(e), Some(l)) => Some(l - e),
            _ => None,
        };
        let registries = self
            .agents
            .iter()
            .filter_map(|(id, a)| match a {
                AgentState::PuCoalition(c) => Some((id.clone(), c.registry.clone())),
                _ => None,
            })
            .collect();
        RunReport {
            event_log: self.log,
            msg_counts: self.counts,
            sent_messages: self.sent,
            per_agent: self.per_agent,
            per_su_response,
            run_response,
            allocations: self.allocations,
            quiescent_at: self.clock,
            initial_capacity: self.initial_capacity,
            final_capacity: self.capacities,
            registries,
            violations: self.violations,
        }
    }
}

/// Runs `scenario` to quiescence with the default event cap.
pub fn run(scenario: &Scenario) -> Result<RunReport, SimError> {
    run_with_cap(scenario, DEFAULT_EVENT_CAP)
}

pub fn run_with_cap(scenario: &Scenario, cap: u64) -> Result<RunReport, SimError> {
    World::new(scenario)?.run_to_quiescence(cap)
}
