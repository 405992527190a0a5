//! Ego-network betweenness and similarity for SimBet.

use std::collections::{BTreeMap, BTreeSet};

use super::graph::UGraph;
use crate::types::NodeId;

/// Sum of `1/[A²](i,j)` over unordered non-adjacent pairs of nodes other
/// than `ego`, skipping pairs with no two-step path.
pub fn ego_betweenness(g: &UGraph, ego: usize) -> f64 {
    let n = g.node_count();
    let mut bet = 0.0;
    for i in 0..n {
        if i == ego {
            continue;
        }
        for j in i + 1..n {
            if j == ego || g.has_edge(i, j) {
                continue;
            }
            let paths = g.neighbors(i).intersection_len(g.neighbors(j));
            if paths > 0 {
                bet += 1.0 / paths as f64;
            }
        }
    }
    bet
}

/// A node's view of its neighbourhood: whom it met, and whom they reported
/// having met. Nodes further than two hops away are never represented.
#[derive(Debug, Clone, Default)]
pub struct EgoNetwork {
    me: NodeId,
    contacts: BTreeSet<NodeId>,
    reported: BTreeMap<NodeId, BTreeSet<NodeId>>,
    betweenness: f64,
}

impl EgoNetwork {
    pub fn new(me: NodeId) -> Self {
        EgoNetwork {
            me,
            ..Default::default()
        }
    }

    pub fn contacts(&self) -> &BTreeSet<NodeId> {
        &self.contacts
    }

    /// Adds `peer` as a direct contact and stores its contact list.
    pub fn on_meet(&mut self, peer: NodeId, peer_contacts: &BTreeSet<NodeId>) {
        let fresh = self.contacts.insert(peer);
        let mut list = peer_contacts.clone();
        list.remove(&peer);
        let changed = self.reported.get(&peer) != Some(&list);
        if changed {
            self.reported.insert(peer, list);
        }
        if fresh || changed {
            self.betweenness = ego_betweenness(&self.ego_graph(), 0);
        }
    }

    /// Ego subgraph over `me` (index 0) and its direct contacts in id order.
    pub fn ego_graph(&self) -> UGraph {
        let members: Vec<NodeId> = self.contacts.iter().copied().collect();
        let index: BTreeMap<NodeId, usize> = members
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i + 1))
            .collect();
        let mut g = UGraph::new(members.len() + 1);
        for (&c, &ci) in &index {
            g.add_edge(0, ci);
            if let Some(list) = self.reported.get(&c) {
                for x in list {
                    if let Some(&xi) = index.get(x) {
                        g.add_edge(ci, xi);
                    }
                }
            }
        }
        g
    }

    /// Full two-hop adjacency: `me` first, then every other known node in
    /// id order. Returned with the id of each row.
    pub fn matrix(&self) -> (Vec<NodeId>, UGraph) {
        let mut known: BTreeSet<NodeId> = self.contacts.clone();
        for list in self.reported.values() {
            known.extend(list.iter().copied());
        }
        known.remove(&self.me);
        let mut ids = vec![self.me];
        ids.extend(known);
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut g = UGraph::new(ids.len());
        for c in &self.contacts {
            g.add_edge(0, index[c]);
        }
        for (c, list) in &self.reported {
            for x in list {
                g.add_edge(index[c], index[x]);
            }
        }
        (ids, g)
    }

    pub fn betweenness(&self) -> f64 {
        self.betweenness
    }

    /// Number of neighbours `me` has in common with `dst`; 0 for unknown
    /// destinations.
    pub fn similarity(&self, dst: NodeId) -> usize {
        if dst == self.me {
            return 0;
        }
        self.contacts
            .iter()
            .filter(|&&c| {
                c != dst
                    && (self.reported.get(&c).is_some_and(|l| l.contains(&dst))
                        || self.reported.get(&dst).is_some_and(|l| l.contains(&c)))
            })
            .count()
    }
}
