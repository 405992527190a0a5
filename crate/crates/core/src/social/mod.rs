//! Encounter-derived state consumed by the routing protocols.
//!
//! Each node owns its encounter history, contact-duration samples, window
//! centrality, ego network and rank. The familiar graph (pairs whose total
//! contact time reached the familiar threshold) and the k-clique communities
//! built on it are shared by all nodes.

mod centrality;
mod ebr;
mod ego;
mod encounters;
pub mod graph;
mod kclique;
mod peoplerank;
mod prophet;
mod tecd;

pub use centrality::WindowCentrality;
pub use ebr::{EbrParams, EbrState};
pub use ego::{ego_betweenness, EgoNetwork};
pub use encounters::{EncounterHistory, PeerStats};
pub use kclique::{kclique_communities, maximal_cliques};
pub use peoplerank::PeopleRankState;
pub use prophet::{ProphetParams, ProphetState};
pub use tecd::TecdState;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{NodeId, Roster, SimTime};
use graph::{BitSet, UGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SocialParams {
    /// Clique size for community percolation.
    pub k: usize,
    /// Seconds of cumulative contact after which two nodes are familiar.
    pub familiar_threshold: SimTime,
    pub centrality_window: SimTime,
    pub daily_samples: usize,
    pub damping: f64,
    /// Multiplier applied to every duration booked into the daily samples.
    pub duration_scale: f64,
}

impl Default for SocialParams {
    fn default() -> Self {
        SocialParams {
            k: 5,
            familiar_threshold: 700,
            centrality_window: 6 * 3600,
            daily_samples: 24,
            damping: 0.8,
            duration_scale: 1.0,
        }
    }
}

/// Which parts of the social state a protocol needs maintained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tracks {
    pub communities: bool,
    pub centrality: bool,
    pub tecd: bool,
    pub ego: bool,
    pub peoplerank: bool,
}

impl Tracks {
    pub const ALL: Tracks = Tracks {
        communities: true,
        centrality: true,
        tecd: true,
        ego: true,
        peoplerank: true,
    };
}

/// Familiar graph plus its k-clique communities, recomputed whenever an
/// edge appears. Edges are never removed.
#[derive(Debug, Clone)]
pub struct FamiliarGraph {
    threshold: SimTime,
    k: usize,
    detect: bool,
    graph: UGraph,
    communities: Vec<BitSet>,
    membership: Vec<Vec<usize>>,
}

impl FamiliarGraph {
    pub fn new(n: usize, threshold: SimTime, k: usize, detect: bool) -> Self {
        FamiliarGraph {
            threshold,
            k,
            detect,
            graph: UGraph::new(n),
            communities: Vec::new(),
            membership: vec![Vec::new(); n],
        }
    }

    /// Feeds the current cumulative contact time of a pair; returns true if
    /// this made the pair familiar.
    pub fn observe(&mut self, a: NodeId, b: NodeId, total: SimTime) -> bool {
        if total < self.threshold || !self.graph.add_edge(a.index(), b.index()) {
            return false;
        }
        if self.detect {
            self.recompute();
        }
        true
    }

    fn recompute(&mut self) {
        self.communities = kclique_communities(&self.graph, self.k)
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        for m in &mut self.membership {
            m.clear();
        }
        for (ci, c) in self.communities.iter().enumerate() {
            for v in c.iter() {
                if v >= self.membership.len() {
                    self.membership.resize(v + 1, Vec::new());
                }
                self.membership[v].push(ci);
            }
        }
    }

    pub fn graph(&self) -> &UGraph {
        &self.graph
    }

    pub fn is_familiar(&self, a: NodeId, b: NodeId) -> bool {
        self.graph.has_edge(a.index(), b.index())
    }

    pub fn degree(&self, a: NodeId) -> usize {
        self.graph.degree(a.index())
    }

    pub fn communities(&self) -> &[BitSet] {
        &self.communities
    }

    /// Indices of the communities `n` belongs to.
    pub fn communities_of(&self, n: NodeId) -> &[usize] {
        self.membership.get(n.index()).map_or(&[], Vec::as_slice)
    }

    /// First community (in index order) containing both nodes.
    pub fn shared_community(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.communities_of(a)
            .iter()
            .copied()
            .find(|&c| self.communities[c].contains(b.index()))
    }

    pub fn in_community(&self, c: usize, n: NodeId) -> bool {
        self.communities[c].contains(n.index())
    }
}

#[derive(Debug, Clone)]
pub struct NodeSocial {
    pub history: EncounterHistory,
    pub tecd: TecdState,
    pub centrality: WindowCentrality,
    pub ego: EgoNetwork,
    pub peoplerank: PeopleRankState,
}

#[derive(Debug, Clone)]
pub struct SocialState {
    params: SocialParams,
    tracks: Tracks,
    nodes: Vec<NodeSocial>,
    familiar: FamiliarGraph,
}

impl SocialState {
    pub fn new(roster: &Roster, params: SocialParams, tracks: Tracks) -> Self {
        let n = roster.id_bound();
        let nodes = (0..n)
            .map(|i| NodeSocial {
                history: EncounterHistory::default(),
                tecd: TecdState::new(params.daily_samples, params.duration_scale),
                centrality: WindowCentrality::new(params.centrality_window),
                ego: EgoNetwork::new(NodeId(i as u32)),
                peoplerank: PeopleRankState::new(params.damping),
            })
            .collect();
        SocialState {
            params,
            tracks,
            nodes,
            familiar: FamiliarGraph::new(
                n,
                params.familiar_threshold,
                params.k,
                tracks.communities,
            ),
        }
    }

    pub fn params(&self) -> &SocialParams {
        &self.params
    }

    pub fn node(&self, id: NodeId) -> &NodeSocial {
        &self.nodes[id.index()]
    }

    pub fn familiar(&self) -> &FamiliarGraph {
        &self.familiar
    }

    /// Control-plane exchange at the start of a contact.
    pub fn on_contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        let (ai, bi) = (a.index(), b.index());
        for (x, y) in [(ai, b), (bi, a)] {
            self.nodes[x].history.contact_started(y, now);
            if self.tracks.centrality {
                self.nodes[x].centrality.on_contact_start(y, now);
            }
        }
        if self.tracks.ego {
            let a_list = self.nodes[ai].ego.contacts().clone();
            let b_list = self.nodes[bi].ego.contacts().clone();
            self.nodes[ai].ego.on_meet(b, &b_list);
            self.nodes[bi].ego.on_meet(a, &a_list);
        }
        if self.tracks.peoplerank {
            let social = self.familiar.is_familiar(a, b);
            let (ra, rb) = (
                self.nodes[ai].peoplerank.rank(),
                self.nodes[bi].peoplerank.rank(),
            );
            let (da, db) = (self.familiar.degree(a), self.familiar.degree(b));
            self.nodes[ai].peoplerank.on_meet(b, rb, db, social);
            self.nodes[bi].peoplerank.on_meet(a, ra, da, social);
        }
    }

    /// Books a finished contact `[start, end]`.
    pub fn on_contact_down(&mut self, a: NodeId, b: NodeId, start: SimTime, end: SimTime) {
        for (x, y) in [(a, b), (b, a)] {
            let node = &mut self.nodes[x.index()];
            let span = node.history.record_contact(y, start, end);
            if let (true, Some((s, e))) = (self.tracks.tecd, span) {
                node.tecd.book(y, s, e);
            }
            if self.tracks.centrality {
                node.centrality.on_contact_end(y, start, end);
            }
        }
        let total = self.nodes[a.index()].history.total_duration(b);
        self.familiar.observe(a, b, total);
    }

    /// Local rank of `n` within community `c`.
    pub fn local_rank(&self, n: NodeId, c: usize, now: SimTime) -> f64 {
        self.node(n)
            .centrality
            .local(now, &self.familiar.communities()[c])
    }

    pub fn global_rank(&self, n: NodeId, now: SimTime) -> f64 {
        self.node(n).centrality.global(now)
    }

    /// One row per rostered node describing its social state at `now`.
    pub fn snapshot(&self, roster: &Roster, now: SimTime) -> Vec<SocialRow> {
        roster
            .ids()
            .map(|id| {
                let node = self.node(id);
                let comms = self.familiar.communities_of(id);
                SocialRow {
                    time: now,
                    node: id,
                    communities: comms.to_vec(),
                    familiar_degree: self.familiar.degree(id),
                    global_centrality: node.centrality.global(now),
                    local_centrality: comms.first().map(|&c| self.local_rank(id, c, now)),
                    importance: node.tecd.importance(now),
                    betweenness: node.ego.betweenness(),
                    rank: node.peoplerank.rank(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocialRow {
    pub time: SimTime,
    pub node: NodeId,
    pub communities: Vec<usize>,
    pub familiar_degree: usize,
    pub global_centrality: f64,
    pub local_centrality: Option<f64>,
    pub importance: f64,
    pub betweenness: f64,
    pub rank: f64,
}

pub const SOCIAL_DUMP_HEADER: &str =
    "time_s,node,communities,familiar_degree,global_centrality,local_centrality,importance,betweenness,rank";

pub fn write_social_dump(rows: &[SocialRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from(SOCIAL_DUMP_HEADER);
    out.push('\n');
    for r in rows {
        let comms: Vec<String> = r.communities.iter().map(usize::to_string).collect();
        let local = r.local_centrality.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.time,
            r.node,
            comms.join(";"),
            r.familiar_degree,
            r.global_centrality,
            local,
            r.importance,
            r.betweenness,
            r.rank
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
