//! Time-evolving contact duration (social weight per daily sample) and the
//! importance derived from it.
//!
//! The day is cut into `S` equal samples. For every peer, `AD[s]` is the
//! mean contact duration booked to sample `s` over all completed occurrences
//! of that sample. The weight towards a peer at the current sample `s` looks
//! one day ahead with linearly decreasing weights:
//!
//! ```text
//! w = sum_{j=1..S} AD[(s+j-1) mod S] * (S-j+1) / (S(S+1)/2)
//! ```
//!
//! and a node's importance is the sum of its weights over all peers.

use std::cell::Cell;
use std::collections::BTreeMap;

use crate::types::{NodeId, SimTime, SECONDS_PER_DAY};

#[derive(Debug, Clone, Default)]
struct PeerSamples {
    /// Booked seconds per sample, over every occurrence.
    sum: Vec<f64>,
    /// Latest occurrence booked to and the amount booked there; it may still
    /// be open and then must not enter the mean yet.
    latest: Option<(u64, f64)>,
}

#[derive(Debug, Clone)]
pub struct TecdState {
    samples: usize,
    sample_len: SimTime,
    scale: f64,
    peers: BTreeMap<NodeId, PeerSamples>,
    importance_cache: Cell<Option<(SimTime, f64)>>,
}

impl TecdState {
    /// `samples` must divide the day evenly. `scale` multiplies every booked
    /// duration.
    pub fn new(samples: usize, scale: f64) -> Self {
        assert!(samples >= 1, "at least one daily sample");
        TecdState {
            samples,
            sample_len: SECONDS_PER_DAY / samples as SimTime,
            scale,
            peers: BTreeMap::new(),
            importance_cache: Cell::new(None),
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Global index of the sample occurrence containing `t`.
    fn occurrence(&self, t: SimTime) -> u64 {
        t / self.sample_len
    }

    pub fn sample_of(&self, t: SimTime) -> usize {
        (self.occurrence(t) % self.samples as u64) as usize
    }

    /// Books the contact time `[start, end)` with `peer` to the samples it
    /// overlaps.
    pub fn book(&mut self, peer: NodeId, start: SimTime, end: SimTime) {
        if end <= start {
            return;
        }
        self.importance_cache.set(None);
        let (samples, len, scale) = (self.samples, self.sample_len, self.scale);
        let entry = self.peers.entry(peer).or_insert_with(|| PeerSamples {
            sum: vec![0.0; samples],
            latest: None,
        });
        let mut t = start;
        while t < end {
            let occ = t / len;
            let piece_end = ((occ + 1) * len).min(end);
            let amount = (piece_end - t) as f64 * scale;
            entry.sum[(occ % samples as u64) as usize] += amount;
            entry.latest = match entry.latest {
                Some((o, a)) if o == occ => Some((o, a + amount)),
                Some((o, a)) if o > occ => Some((o, a)),
                _ => Some((occ, amount)),
            };
            t = piece_end;
        }
    }

    /// Mean booked duration of sample `s` over its completed occurrences.
    pub fn average(&self, peer: NodeId, s: usize, now: SimTime) -> f64 {
        let Some(p) = self.peers.get(&peer) else {
            return 0.0;
        };
        let closed = self.occurrence(now);
        let days = closed / self.samples as u64 + u64::from((s as u64) < closed % self.samples as u64);
        if days == 0 {
            return 0.0;
        }
        let mut total = p.sum[s];
        if let Some((occ, amount)) = p.latest {
            if occ >= closed && (occ % self.samples as u64) as usize == s {
                total -= amount;
            }
        }
        total / days as f64
    }

    /// Social weight towards `peer` at the sample containing `now`.
    pub fn weight(&self, peer: NodeId, now: SimTime) -> f64 {
        if !self.peers.contains_key(&peer) {
            return 0.0;
        }
        let s = self.sample_of(now);
        let n = self.samples;
        let total = (n * (n + 1) / 2) as f64;
        (1..=n)
            .map(|j| self.average(peer, (s + j - 1) % n, now) * (n - j + 1) as f64)
            .sum::<f64>()
            / total
    }

    /// Sum of weights over every peer ever met.
    pub fn importance(&self, now: SimTime) -> f64 {
        if let Some((t, v)) = self.importance_cache.get() {
            if t == now {
                return v;
            }
        }
        let v = self.peers.keys().map(|&p| self.weight(p, now)).sum();
        self.importance_cache.set(Some((now, v)));
        v
    }
}
