//! Connectivity and traffic inputs: contact sequences, workloads, rosters.
//!
//! Contact sequences come either from a trace file or from one of the
//! seeded generators; workloads from a file or from [`gen_workload`].

mod community;
mod trace;
mod waypoint;
mod workload;

pub use community::{gen_community_schedule, schedule, Anchor, CommunityParams, Presence};
pub use trace::{
    convert_pairwise, parse_roster, parse_trace, read_trace, write_roster, write_trace,
};
pub use waypoint::{gen_random_waypoint, WaypointParams};
pub use workload::{
    gen_workload, parse_workload, select_pairs, write_workload, WorkloadEntry, WorkloadParams,
    WorkloadSequence,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{NodeId, Roster, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactKind {
    Down,
    Up,
}

/// Link up/down between two nodes; `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContactEvent {
    pub time: SimTime,
    pub kind: ContactKind,
    pub a: NodeId,
    pub b: NodeId,
}

impl ContactEvent {
    pub fn new(time: SimTime, kind: ContactKind, x: NodeId, y: NodeId) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        ContactEvent { time, kind, a, b }
    }
}

/// A closed contact interval `[start, end]` between `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Contact {
    pub a: NodeId,
    pub b: NodeId,
    pub start: SimTime,
    pub end: SimTime,
}

/// Time-sorted, pairing-valid list of contact events plus the node roster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactSequence {
    events: Vec<ContactEvent>,
    roster: Roster,
    duration: SimTime,
}

impl ContactSequence {
    /// Wraps an event list after checking ordering and pairing.
    pub fn new(events: Vec<ContactEvent>, roster: Roster, duration: SimTime) -> Result<Self> {
        validate_events(&events, &roster)?;
        Ok(ContactSequence {
            events,
            roster,
            duration,
        })
    }

    /// Builds a sequence from intervals. Intervals of the same pair that
    /// overlap or touch are merged into one contact; empty ones are skipped.
    pub fn from_intervals(
        intervals: impl IntoIterator<Item = Contact>,
        roster: Roster,
        duration: SimTime,
    ) -> Result<Self> {
        let mut per_pair: BTreeMap<(NodeId, NodeId), Vec<(SimTime, SimTime)>> = BTreeMap::new();
        for c in intervals {
            if c.end <= c.start {
                continue;
            }
            let key = if c.a <= c.b { (c.a, c.b) } else { (c.b, c.a) };
            per_pair.entry(key).or_default().push((c.start, c.end));
        }
        let mut events = Vec::new();
        for ((a, b), mut spans) in per_pair {
            spans.sort_unstable();
            let mut merged: Vec<(SimTime, SimTime)> = Vec::with_capacity(spans.len());
            for (s, e) in spans {
                match merged.last_mut() {
                    Some(last) if s <= last.1 => last.1 = last.1.max(e),
                    _ => merged.push((s, e)),
                }
            }
            for (s, e) in merged {
                events.push(ContactEvent::new(s, ContactKind::Up, a, b));
                events.push(ContactEvent::new(e, ContactKind::Down, a, b));
            }
        }
        events.sort_unstable();
        ContactSequence::new(events, roster, duration)
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn duration(&self) -> SimTime {
        self.duration
    }

    /// Replaces the roster, checking that every node referenced by an event
    /// is on the new one.
    pub fn with_roster(mut self, roster: Roster) -> Result<Self> {
        validate_events(&self.events, &roster)?;
        self.roster = roster;
        Ok(self)
    }

    /// Contacts as closed intervals, ordered by start time.
    pub fn intervals(&self) -> Vec<Contact> {
        let mut open: BTreeMap<(NodeId, NodeId), SimTime> = BTreeMap::new();
        let mut out = Vec::with_capacity(self.events.len() / 2);
        for ev in &self.events {
            match ev.kind {
                ContactKind::Up => {
                    open.insert((ev.a, ev.b), ev.time);
                }
                ContactKind::Down => {
                    if let Some(start) = open.remove(&(ev.a, ev.b)) {
                        out.push(Contact {
                            a: ev.a,
                            b: ev.b,
                            start,
                            end: ev.time,
                        });
                    }
                }
            }
        }
        out.sort_by_key(|c| (c.start, c.a, c.b));
        out
    }
}

/// Checks time ordering and Up/Down pairing.
///
/// Per pair, each Up must be followed by a Down strictly later, and the next
/// Up must come strictly after that Down. Every Up must be closed.
pub fn validate_events(events: &[ContactEvent], roster: &Roster) -> Result<()> {
    let mut open: BTreeMap<(NodeId, NodeId), SimTime> = BTreeMap::new();
    let mut last_down: BTreeMap<(NodeId, NodeId), SimTime> = BTreeMap::new();
    let mut prev = 0;
    for (index, ev) in events.iter().enumerate() {
        if ev.time < prev {
            return Err(Error::Unordered {
                index,
                time: ev.time,
            });
        }
        prev = ev.time;
        for id in [ev.a, ev.b] {
            if !roster.contains(id) {
                return Err(Error::UnknownNode(id));
            }
        }
        let pairing = |reason| Error::Pairing {
            a: ev.a,
            b: ev.b,
            time: ev.time,
            reason,
        };
        if ev.a >= ev.b {
            return Err(pairing("pair must satisfy a < b"));
        }
        let key = (ev.a, ev.b);
        match ev.kind {
            ContactKind::Up => {
                if open.contains_key(&key) {
                    return Err(pairing("Up while the pair is already in contact"));
                }
                if last_down.get(&key).is_some_and(|&t| t >= ev.time) {
                    return Err(pairing("Up at the same instant as the previous Down"));
                }
                open.insert(key, ev.time);
            }
            ContactKind::Down => match open.remove(&key) {
                None => return Err(pairing("Down without a preceding Up")),
                Some(start) if start >= ev.time => {
                    return Err(pairing("Down must be strictly later than its Up"))
                }
                Some(_) => {
                    last_down.insert(key, ev.time);
                }
            },
        }
    }
    if let Some(((a, b), time)) = open.into_iter().next() {
        return Err(Error::Pairing {
            a,
            b,
            time,
            reason: "Up never closed by a Down",
        });
    }
    Ok(())
}
