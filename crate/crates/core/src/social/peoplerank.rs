//! Distributed PageRank-style ranking over the social graph.

use std::collections::BTreeMap;

use crate::types::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct PeopleRankState {
    rank: f64,
    damping: f64,
    /// Last (rank, degree) heard from each social neighbour.
    neighbors: BTreeMap<NodeId, (f64, usize)>,
}

impl PeopleRankState {
    pub fn new(damping: f64) -> Self {
        PeopleRankState {
            rank: 1.0 - damping,
            damping,
            neighbors: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> f64 {
        self.rank
    }

    pub fn social_neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.neighbors.keys().copied()
    }

    /// Stores what `peer` reported and recomputes the rank when the peer is
    /// a social neighbour; meetings with strangers change nothing.
    pub fn on_meet(&mut self, peer: NodeId, peer_rank: f64, peer_degree: usize, social: bool) {
        if !social {
            return;
        }
        debug_assert!(peer_degree >= 1);
        self.neighbors.insert(peer, (peer_rank, peer_degree.max(1)));
        let sum: f64 = self
            .neighbors
            .values()
            .map(|&(r, deg)| r / deg as f64)
            .sum();
        self.rank = (1.0 - self.damping) + self.damping * sum;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_node_keeps_base_rank() {
        let mut s = PeopleRankState::new(0.8);
        s.on_meet(NodeId(1), 5.0, 1, false);
        assert!((s.rank() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mutual_pair_converges_to_one() {
        let (mut a, mut b) = (PeopleRankState::new(0.8), PeopleRankState::new(0.8));
        for _ in 0..200 {
            let (ra, rb) = (a.rank(), b.rank());
            a.on_meet(NodeId(1), rb, 1, true);
            b.on_meet(NodeId(0), ra, 1, true);
        }
        assert!((a.rank() - 1.0).abs() < 1e-12);
        assert!((b.rank() - 1.0).abs() < 1e-12);
    }
}
