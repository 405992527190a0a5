//! Discrete-event store-carry-and-forward engine.
//!
//! Events at the same instant are handled in this order: transfer
//! completions, TTL expiries, contact ups, message creations, contact downs.
//! A transfer finishing exactly when its contact ends therefore completes,
//! and a message created as a contact comes up is offered on it.
//!
//! Every active contact is an independent half-duplex link carrying one
//! transfer at a time from a queue ranked by (deliveries first, earliest
//! deadline, message id, sender). Each queued transfer is decided again when
//! it reaches the head of the queue. The engine itself draws no random
//! numbers.

mod buffer;
mod records;

pub use buffer::{Buffer, Insert};
pub use records::{AccountingRecord, DecisionRecord, RecordKind};

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::metrics::{MetricsCollector, RunReport};
use crate::routing::{build_router, Decision, ProtocolKind, ProtocolParams, Router, TokenShare};
use crate::sources::{ContactEvent, ContactKind, ContactSequence, WorkloadEntry, WorkloadSequence};
use crate::types::{Message, MessageId, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Bytes per node; `None` is unlimited.
    pub buffer_capacity: Option<u64>,
    /// Bytes per second per link; `None` makes every transfer instantaneous.
    pub bandwidth: Option<u64>,
    pub hop_limit: Option<u32>,
    pub ttl: SimTime,
    /// Messages created before this instant are left out of every counter.
    pub warmup: SimTime,
    /// Last instant processed.
    pub end_time: SimTime,
}

impl EngineConfig {
    /// Unlimited buffers and bandwidth.
    pub fn unlimited(ttl: SimTime, end_time: SimTime) -> Self {
        EngineConfig {
            buffer_capacity: None,
            bandwidth: None,
            hop_limit: None,
            ttl,
            warmup: 0,
            end_time,
        }
    }

    pub fn transfer_time(&self, size: u64) -> SimTime {
        match self.bandwidth {
            Some(bw) => size.div_ceil(bw.max(1)),
            None => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: NodeId,
    pub buffer: Buffer,
    /// Messages this node received as their destination.
    pub delivered: HashSet<MessageId>,
}

impl NodeState {
    pub fn new(id: NodeId, capacity: Option<u64>) -> Self {
        NodeState {
            id,
            buffer: Buffer::new(capacity),
            delivered: HashSet::new(),
        }
    }
}

/// Stores `m` at `node`, reporting evictions and rejection as drops.
pub fn buffer_insert(node: &mut NodeState, m: Message, now: SimTime) -> Vec<AccountingRecord> {
    let id = m.id;
    match node.buffer.insert(m) {
        Insert::Stored { evicted } => evicted
            .into_iter()
            .map(|e| AccountingRecord::at(RecordKind::Dropped, now, e.id, node.id))
            .collect(),
        Insert::Rejected => vec![AccountingRecord::at(RecordKind::Dropped, now, id, node.id)],
    }
}

/// Removes every buffered message whose deadline lies before `now`.
pub fn expire_ttl(node: &mut NodeState, now: SimTime) -> Vec<AccountingRecord> {
    let stale: Vec<MessageId> = node
        .buffer
        .iter()
        .filter(|m| m.is_expired(now))
        .map(|m| m.id)
        .collect();
    stale
        .into_iter()
        .map(|id| {
            node.buffer.remove(id);
            AccountingRecord::at(RecordKind::Expired, now, id, node.id)
        })
        .collect()
}

const CLASS_COMPLETE: u8 = 0;
const CLASS_EXPIRE: u8 = 1;
const CLASS_UP: u8 = 2;
const CLASS_CREATE: u8 = 3;
const CLASS_DOWN: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Scheduled {
    Complete { link: (NodeId, NodeId), serial: u64 },
    Expire(MessageId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    /// 0 for deliveries.
    class: u8,
    deadline: SimTime,
    msg: MessageId,
    from: NodeId,
}

#[derive(Debug, Clone, Copy)]
struct InFlight {
    from: NodeId,
    to: NodeId,
    msg: MessageId,
    decision: Decision,
    serial: u64,
}

#[derive(Debug)]
struct Link {
    start: SimTime,
    queue: BTreeSet<Pending>,
    in_flight: Option<InFlight>,
}

fn link_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

fn other_end(key: (NodeId, NodeId), n: NodeId) -> NodeId {
    if key.0 == n {
        key.1
    } else {
        key.0
    }
}

fn class_of(kind: ContactKind) -> u8 {
    match kind {
        ContactKind::Up => CLASS_UP,
        ContactKind::Down => CLASS_DOWN,
    }
}

enum Next {
    Scheduled,
    Contact,
    Create,
}

/// A run in progress. Drive it with [`Simulation::step`] to inspect state
/// between events, or [`Simulation::run`] to completion.
pub struct Simulation {
    cfg: EngineConfig,
    router: Box<dyn Router>,
    nodes: Vec<NodeState>,
    node_ids: Vec<NodeId>,
    contacts: Vec<ContactEvent>,
    next_contact: usize,
    workload: Vec<WorkloadEntry>,
    next_create: usize,
    scheduled: BinaryHeap<Reverse<(SimTime, u8, u64, Scheduled)>>,
    sched_seq: u64,
    links: BTreeMap<(NodeId, NodeId), Link>,
    active: Vec<BTreeSet<NodeId>>,
    dirty: VecDeque<(NodeId, NodeId)>,
    serial: u64,
    now: SimTime,
    collector: MetricsCollector,
    record_log: Option<Vec<AccountingRecord>>,
    decision_log: Option<Vec<DecisionRecord>>,
}

impl Simulation {
    /// Rejects workloads naming nodes outside the contact roster.
    pub fn new(
        cfg: EngineConfig,
        contacts: &ContactSequence,
        workload: &WorkloadSequence,
        router: Box<dyn Router>,
    ) -> Result<Self> {
        let roster = contacts.roster();
        workload.check_nodes(roster)?;
        if cfg.bandwidth == Some(0) {
            return Err(Error::config("bandwidth", "must be positive"));
        }
        let n = roster.id_bound();
        let nodes = (0..n)
            .map(|i| NodeState::new(NodeId(i as u32), cfg.buffer_capacity))
            .collect();
        let mut events = contacts.events().to_vec();
        events.sort_by_key(|e| (e.time, class_of(e.kind), e.a, e.b));
        Ok(Simulation {
            cfg,
            router,
            nodes,
            node_ids: roster.ids().collect(),
            contacts: events,
            next_contact: 0,
            workload: workload.entries().to_vec(),
            next_create: 0,
            scheduled: BinaryHeap::new(),
            sched_seq: 0,
            links: BTreeMap::new(),
            active: vec![BTreeSet::new(); n],
            dirty: VecDeque::new(),
            serial: 0,
            now: 0,
            collector: MetricsCollector::new(cfg.warmup),
            record_log: None,
            decision_log: None,
        })
    }

    /// Keeps every accounting record for later inspection.
    pub fn with_record_log(mut self) -> Self {
        self.record_log = Some(Vec::new());
        self
    }

    /// Keeps every router verdict for later inspection.
    pub fn with_decision_log(mut self) -> Self {
        self.decision_log = Some(Vec::new());
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id.index()]
    }

    /// Rostered nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeState> + '_ {
        self.node_ids.iter().map(|id| &self.nodes[id.index()])
    }

    pub fn router(&self) -> &dyn Router {
        self.router.as_ref()
    }

    pub fn records(&self) -> &[AccountingRecord] {
        self.record_log.as_deref().unwrap_or(&[])
    }

    pub fn decisions(&self) -> &[DecisionRecord] {
        self.decision_log.as_deref().unwrap_or(&[])
    }

    pub fn report(&self) -> RunReport {
        self.collector.report()
    }

    /// Active contacts, canonical pair order.
    pub fn active_links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.links.keys().copied()
    }

    fn peek(&self) -> Option<(SimTime, u8, Next)> {
        let mut best: Option<(SimTime, u8, Next)> = None;
        let mut consider = |t: SimTime, c: u8, which: Next| {
            if best.as_ref().is_none_or(|b| (t, c) < (b.0, b.1)) {
                best = Some((t, c, which));
            }
        };
        if let Some(Reverse((t, c, _, _))) = self.scheduled.peek() {
            consider(*t, *c, Next::Scheduled);
        }
        if let Some(e) = self.contacts.get(self.next_contact) {
            consider(e.time, class_of(e.kind), Next::Contact);
        }
        if let Some(w) = self.workload.get(self.next_create) {
            consider(w.create_time, CLASS_CREATE, Next::Create);
        }
        best.filter(|b| b.0 <= self.cfg.end_time)
    }

    /// Time of the next event, if any remains before the end.
    pub fn next_time(&self) -> Option<SimTime> {
        self.peek().map(|b| b.0)
    }

    /// Processes one event and everything it triggers at the same instant;
    /// returns its time, or `None` once the run is over.
    pub fn step(&mut self) -> Option<SimTime> {
        let (t, _, which) = self.peek()?;
        self.now = t;
        match which {
            Next::Scheduled => {
                let Reverse((_, _, _, ev)) = self.scheduled.pop().expect("peeked");
                match ev {
                    Scheduled::Complete { link, serial } => self.on_complete(link, serial),
                    Scheduled::Expire(id) => self.on_expire(id),
                }
            }
            Next::Contact => {
                let e = self.contacts[self.next_contact];
                self.next_contact += 1;
                match e.kind {
                    ContactKind::Up => self.on_up(e.a, e.b),
                    ContactKind::Down => self.on_down(e.a, e.b),
                }
            }
            Next::Create => {
                let w = self.workload[self.next_create];
                self.next_create += 1;
                self.on_create(w);
            }
        }
        self.drain();
        Some(t)
    }

    /// Processes every event up to and including `t`.
    pub fn run_until(&mut self, t: SimTime) {
        while self.next_time().is_some_and(|n| n <= t) {
            self.step();
        }
    }

    pub fn run(mut self) -> Self {
        while self.step().is_some() {}
        self
    }

    fn emit(&mut self, rec: AccountingRecord) {
        self.collector.record(&rec);
        if let Some(log) = &mut self.record_log {
            log.push(rec);
        }
    }

    fn schedule(&mut self, t: SimTime, class: u8, ev: Scheduled) {
        self.sched_seq += 1;
        self.scheduled.push(Reverse((t, class, self.sched_seq, ev)));
    }

    fn evaluate(&mut self, from: NodeId, to: NodeId, id: MessageId) -> Decision {
        let now = self.now;
        let Some(m) = self.nodes[from.index()].buffer.get(id) else {
            return Decision::Skip;
        };
        let peer = &self.nodes[to.index()];
        if m.is_expired(now) || peer.buffer.contains(id) || peer.delivered.contains(&id) {
            return Decision::Skip;
        }
        if self.cfg.hop_limit.is_some_and(|l| m.hop_count >= l) {
            return Decision::Skip;
        }
        if to == m.dst {
            return Decision::Deliver;
        }
        let decision = self.router.decide(from, to, m, now);
        if let Some(log) = &mut self.decision_log {
            log.push(DecisionRecord {
                time: now,
                carrier: from,
                peer: to,
                message: id,
                decision,
            });
        }
        decision
    }

    fn enqueue(&mut self, from: NodeId, to: NodeId, id: MessageId) {
        let decision = self.evaluate(from, to, id);
        if decision.is_skip() {
            return;
        }
        let deadline = self.nodes[from.index()].buffer.get(id).expect("evaluated").deadline();
        let key = link_key(from, to);
        let link = self.links.get_mut(&key).expect("active link");
        link.queue.insert(Pending {
            class: u8::from(decision != Decision::Deliver),
            deadline,
            msg: id,
            from,
        });
        self.dirty.push_back(key);
    }

    /// Offers a message newly stored at `node` on all its active links.
    fn offer(&mut self, node: NodeId, id: MessageId) {
        let peers: Vec<NodeId> = self.active[node.index()].iter().copied().collect();
        for p in peers {
            self.enqueue(node, p, id);
        }
    }

    fn drain(&mut self) {
        while let Some(key) = self.dirty.pop_front() {
            self.pump(key);
        }
    }

    /// Starts transfers on an idle link until one is in flight or the queue
    /// runs dry. Instantaneous transfers complete on the spot.
    fn pump(&mut self, key: (NodeId, NodeId)) {
        loop {
            let Some(link) = self.links.get_mut(&key) else {
                return;
            };
            if link.in_flight.is_some() {
                return;
            }
            let Some(p) = link.queue.pop_first() else {
                return;
            };
            let to = other_end(key, p.from);
            let decision = self.evaluate(p.from, to, p.msg);
            if decision.is_skip() {
                continue;
            }
            let size = self.nodes[p.from.index()].buffer.get(p.msg).expect("evaluated").size;
            let duration = self.cfg.transfer_time(size);
            if duration == 0 {
                self.complete(p.from, to, p.msg, decision);
                continue;
            }
            self.serial += 1;
            let serial = self.serial;
            self.links.get_mut(&key).expect("present").in_flight = Some(InFlight {
                from: p.from,
                to,
                msg: p.msg,
                decision,
                serial,
            });
            self.schedule(self.now + duration, CLASS_COMPLETE, Scheduled::Complete { link: key, serial });
            return;
        }
    }

    fn on_complete(&mut self, key: (NodeId, NodeId), serial: u64) {
        let Some(link) = self.links.get_mut(&key) else {
            return;
        };
        match link.in_flight {
            Some(f) if f.serial == serial => {
                link.in_flight = None;
                self.complete(f.from, f.to, f.msg, f.decision);
                self.dirty.push_back(key);
            }
            _ => {}
        }
    }

    fn complete(&mut self, from: NodeId, to: NodeId, id: MessageId, decision: Decision) {
        let now = self.now;
        let abort = AccountingRecord::transfer(RecordKind::Aborted, now, id, from, to, 0);
        let Some(copy) = self.nodes[from.index()].buffer.get(id).cloned() else {
            return self.emit(abort);
        };
        if copy.is_expired(now) {
            return self.emit(abort);
        }
        let hops = copy.hop_count + 1;
        if to == copy.dst {
            self.emit(AccountingRecord::transfer(RecordKind::RelayCompleted, now, id, from, to, hops));
            if self.nodes[to.index()].delivered.insert(id) {
                self.emit(AccountingRecord::transfer(RecordKind::Delivered, now, id, from, to, hops));
                if self.router.single_copy() {
                    self.nodes[from.index()].buffer.remove(id);
                }
            }
            return;
        }
        if self.nodes[to.index()].buffer.contains(id) {
            return self.emit(abort);
        }
        let tokens = match decision {
            Decision::Replicate(share) => {
                let give = share.peer_tokens(copy.tokens);
                if give == 0 {
                    return self.emit(abort);
                }
                if share != TokenShare::Keep {
                    self.nodes[from.index()].buffer.set_tokens(id, copy.tokens - give);
                }
                give
            }
            Decision::Move => {
                self.nodes[from.index()].buffer.remove(id);
                copy.tokens
            }
            Decision::Deliver | Decision::Skip => return self.emit(abort),
        };
        self.emit(AccountingRecord::transfer(RecordKind::RelayCompleted, now, id, from, to, hops));
        let fresh = Message {
            hop_count: hops,
            tokens,
            ..copy
        };
        let drops = buffer_insert(&mut self.nodes[to.index()], fresh, now);
        for r in drops {
            self.emit(r);
        }
        if self.nodes[to.index()].buffer.contains(id) {
            self.offer(to, id);
        }
    }

    fn on_expire(&mut self, id: MessageId) {
        let now = self.now;
        for i in 0..self.node_ids.len() {
            let n = self.node_ids[i];
            if self.nodes[n.index()].buffer.remove(id).is_some() {
                self.emit(AccountingRecord::at(RecordKind::Expired, now, id, n));
            }
        }
    }

    fn on_up(&mut self, a: NodeId, b: NodeId) {
        let now = self.now;
        let key = link_key(a, b);
        debug_assert!(!self.links.contains_key(&key), "duplicate up {a}-{b}");
        self.links.insert(
            key,
            Link {
                start: now,
                queue: BTreeSet::new(),
                in_flight: None,
            },
        );
        self.active[a.index()].insert(b);
        self.active[b.index()].insert(a);
        self.router.on_contact_up(a, b, now);
        for (from, to) in [(a, b), (b, a)] {
            let ids: Vec<MessageId> = self.nodes[from.index()].buffer.iter().map(|m| m.id).collect();
            for id in ids {
                self.enqueue(from, to, id);
            }
        }
        self.dirty.push_back(key);
    }

    fn on_down(&mut self, a: NodeId, b: NodeId) {
        let now = self.now;
        let key = link_key(a, b);
        let Some(link) = self.links.remove(&key) else {
            return;
        };
        self.active[a.index()].remove(&b);
        self.active[b.index()].remove(&a);
        if let Some(f) = link.in_flight {
            self.emit(AccountingRecord::transfer(RecordKind::Aborted, now, f.msg, f.from, f.to, 0));
        }
        for p in &link.queue {
            let to = other_end(key, p.from);
            self.emit(AccountingRecord::transfer(RecordKind::Aborted, now, p.msg, p.from, to, 0));
        }
        self.router.on_contact_down(a, b, link.start, now);
    }

    fn on_create(&mut self, w: WorkloadEntry) {
        let now = self.now;
        let m = Message {
            id: w.id,
            src: w.src,
            dst: w.dst,
            size: w.size,
            created_at: w.create_time,
            ttl: self.cfg.ttl,
            hop_count: 0,
            tokens: self.router.initial_tokens(),
        };
        self.emit(AccountingRecord::at(RecordKind::Created, now, w.id, w.src));
        if let Some(expiry) = m.deadline().checked_add(1) {
            if expiry <= self.cfg.end_time {
                self.schedule(expiry, CLASS_EXPIRE, Scheduled::Expire(w.id));
            }
        }
        let drops = buffer_insert(&mut self.nodes[w.src.index()], m, now);
        for r in drops {
            self.emit(r);
        }
        if self.nodes[w.src.index()].buffer.contains(w.id) {
            self.offer(w.src, w.id);
        }
    }
}

/// Runs one protocol over the given contacts and workload.
pub fn run_scenario(
    cfg: EngineConfig,
    contacts: &ContactSequence,
    workload: &WorkloadSequence,
    protocol: ProtocolKind,
    params: &ProtocolParams,
) -> Result<RunReport> {
    let router = build_router(protocol, params, contacts.roster());
    Ok(Simulation::new(cfg, contacts, workload, router)?.run().report())
}
