use std::collections::BTreeMap;

use crate::types::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PeerStats {
    pub contact_count: u32,
    pub total_duration: SimTime,
    pub last_start: SimTime,
    pub last_encounter_end: SimTime,
}

/// Per-peer encounter counters of one node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncounterHistory {
    peers: BTreeMap<NodeId, PeerStats>,
    active: BTreeMap<NodeId, SimTime>,
}

impl EncounterHistory {
    pub fn stats(&self, peer: NodeId) -> Option<&PeerStats> {
        self.peers.get(&peer)
    }

    pub fn peers(&self) -> impl Iterator<Item = (NodeId, &PeerStats)> {
        self.peers.iter().map(|(&p, s)| (p, s))
    }

    pub fn total_duration(&self, peer: NodeId) -> SimTime {
        self.peers.get(&peer).map_or(0, |s| s.total_duration)
    }

    pub fn contact_started(&mut self, peer: NodeId, start: SimTime) {
        self.active.insert(peer, start);
    }

    /// Records the contact `[start, end]` and returns the span not already
    /// covered by the previous contact with the same peer. An overlapping
    /// contact is merged into the previous one and not counted again.
    pub fn record_contact(
        &mut self,
        peer: NodeId,
        start: SimTime,
        end: SimTime,
    ) -> Option<(SimTime, SimTime)> {
        self.active.remove(&peer);
        if end <= start {
            return None;
        }
        let s = self.peers.entry(peer).or_default();
        if s.contact_count > 0 && start < s.last_encounter_end {
            let from = s.last_encounter_end;
            if end <= from {
                return None;
            }
            s.total_duration += end - from;
            s.last_encounter_end = end;
            return Some((from, end));
        }
        s.contact_count += 1;
        s.total_duration += end - start;
        s.last_start = start;
        s.last_encounter_end = end;
        Some((start, end))
    }

    /// Seconds since the last encounter with `peer`: 0 while in contact,
    /// `None` if never met.
    pub fn time_since(&self, peer: NodeId, now: SimTime) -> Option<SimTime> {
        if self.active.contains_key(&peer) {
            return Some(0);
        }
        self.peers
            .get(&peer)
            .map(|s| now.saturating_sub(s.last_encounter_end))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_durations_add_up() {
        let mut h = EncounterHistory::default();
        h.record_contact(NodeId(1), 0, 100);
        h.record_contact(NodeId(1), 200, 300);
        let s = h.stats(NodeId(1)).unwrap();
        assert_eq!((s.contact_count, s.total_duration), (2, 200));
        assert_eq!(h.time_since(NodeId(1), 350), Some(50));
        assert_eq!(h.time_since(NodeId(2), 350), None);
    }

    #[test]
    fn overlapping_contact_is_merged() {
        let mut h = EncounterHistory::default();
        h.record_contact(NodeId(1), 0, 100);
        assert_eq!(h.record_contact(NodeId(1), 50, 150), Some((100, 150)));
        let s = h.stats(NodeId(1)).unwrap();
        assert_eq!((s.contact_count, s.total_duration), (1, 150));
    }

    #[test]
    fn active_contact_has_zero_timer() {
        let mut h = EncounterHistory::default();
        h.contact_started(NodeId(4), 10);
        assert_eq!(h.time_since(NodeId(4), 99), Some(0));
        h.record_contact(NodeId(4), 10, 100);
        assert_eq!(h.time_since(NodeId(4), 130), Some(30));
    }
}
