//! Cumulative-window degree centrality.

use std::cell::Cell;

use super::graph::BitSet;
use crate::types::{NodeId, SimTime};

/// Unique peers seen per fixed window. A contact marks every window it
/// overlaps once it has ended, and its first window as soon as it starts.
#[derive(Debug, Clone)]
pub struct WindowCentrality {
    window: SimTime,
    peers: Vec<BitSet>,
    global_cache: Cell<Option<(u64, f64)>>,
}

impl WindowCentrality {
    pub fn new(window: SimTime) -> Self {
        assert!(window > 0);
        WindowCentrality {
            window,
            peers: Vec::new(),
            global_cache: Cell::new(None),
        }
    }

    fn mark(&mut self, w: usize, peer: NodeId) {
        if w >= self.peers.len() {
            self.peers.resize(w + 1, BitSet::default());
        }
        if self.peers[w].insert(peer.index()) {
            self.global_cache.set(None);
        }
    }

    pub fn on_contact_start(&mut self, peer: NodeId, start: SimTime) {
        self.mark((start / self.window) as usize, peer);
    }

    pub fn on_contact_end(&mut self, peer: NodeId, start: SimTime, end: SimTime) {
        let last = if end > start { (end - 1) / self.window } else { start / self.window };
        for w in start / self.window..=last {
            self.mark(w as usize, peer);
        }
    }

    fn completed(&self, now: SimTime) -> u64 {
        now / self.window
    }

    /// Mean number of unique peers over the windows completed by `now`.
    pub fn global(&self, now: SimTime) -> f64 {
        let done = self.completed(now);
        if let Some((d, v)) = self.global_cache.get() {
            if d == done {
                return v;
            }
        }
        let v = self.average(done, |s| s.len());
        self.global_cache.set(Some((done, v)));
        v
    }

    /// As [`global`](Self::global), counting only peers in `community`.
    pub fn local(&self, now: SimTime, community: &BitSet) -> f64 {
        self.average(self.completed(now), |s| s.intersection_len(community))
    }

    fn average(&self, done: u64, count: impl Fn(&BitSet) -> usize) -> f64 {
        if done == 0 {
            return 0.0;
        }
        let total: usize = self.peers.iter().take(done as usize).map(count).sum();
        total as f64 / done as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: SimTime = 6 * 3600;

    #[test]
    fn nobody_met() {
        let c = WindowCentrality::new(W);
        assert_eq!(c.global(10 * W), 0.0);
    }

    #[test]
    fn constant_three_per_window() {
        let mut c = WindowCentrality::new(W);
        for w in 0..4 {
            for p in 1..=3 {
                c.on_contact_end(NodeId(p), w * W + 10, w * W + 20);
            }
        }
        assert_eq!(c.global(4 * W), 3.0);
    }

    #[test]
    fn two_then_one() {
        let mut c = WindowCentrality::new(W);
        c.on_contact_end(NodeId(1), 10, 20);
        c.on_contact_end(NodeId(2), 30, 40);
        c.on_contact_end(NodeId(1), W + 5, W + 50);
        assert_eq!(c.global(2 * W), 1.5);
        // The open third window is not counted yet.
        c.on_contact_start(NodeId(3), 2 * W + 1);
        assert_eq!(c.global(2 * W + 2), 1.5);
        let community: BitSet = [1].into_iter().collect();
        assert_eq!(c.local(2 * W, &community), 1.0);
    }

    #[test]
    fn long_contact_spans_windows() {
        let mut c = WindowCentrality::new(W);
        c.on_contact_end(NodeId(1), 100, 3 * W);
        assert_eq!(c.global(3 * W), 1.0);
        assert_eq!(c.global(4 * W), 0.75);
    }
}
