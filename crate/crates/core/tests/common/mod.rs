#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oppnet::engine::{EngineConfig, RecordKind, Simulation};
use oppnet::routing::{build_router, ProtocolKind, ProtocolParams};
use oppnet::social::graph::UGraph;
use oppnet::sources::{Contact, ContactSequence, WorkloadEntry, WorkloadSequence};
use oppnet::types::{GroupLabel, MessageId, NodeId, Roster, SimTime};

/// Every k-subset that is a clique, united when two share k-1 nodes.
pub fn percolation_oracle(g: &UGraph, k: usize) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let nodes: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let clique = nodes
            .iter()
            .enumerate()
            .all(|(x, &u)| nodes[x + 1..].iter().all(|&v| g.has_edge(u, v)));
        if clique {
            cliques.push(nodes);
        }
    }
    let mut comp: Vec<usize> = (0..cliques.len()).collect();
    loop {
        let mut changed = false;
        for i in 0..cliques.len() {
            for j in i + 1..cliques.len() {
                let shared = cliques[i].iter().filter(|u| cliques[j].contains(u)).count();
                if shared == k - 1 && comp[i] != comp[j] {
                    let (lo, hi) = (comp[i].min(comp[j]), comp[i].max(comp[j]));
                    for c in comp.iter_mut() {
                        if *c == hi {
                            *c = lo;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for root in comp.iter().copied().collect::<BTreeSet<_>>() {
        let members: BTreeSet<usize> = cliques
            .iter()
            .zip(&comp)
            .filter(|(_, &c)| c == root)
            .flat_map(|(q, _)| q.iter().copied())
            .collect();
        out.push(members.into_iter().collect());
    }
    out.sort();
    out
}

/// Sum of 1/[A^2](i,j) from an explicit integer matrix product.
pub fn betweenness_oracle(g: &UGraph, ego: usize) -> f64 {
    let n = g.node_count();
    let a: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| g.has_edge(i, j) as i64).collect())
        .collect();
    let mut a2 = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            a2[i][j] = (0..n).map(|m| a[i][m] * a[m][j]).sum();
        }
    }
    let mut bet = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if i != ego && j != ego && a[i][j] == 0 && a2[i][j] > 0 {
                bet += 1.0 / a2[i][j] as f64;
            }
        }
    }
    bet
}

/// Static PeopleRank fixed point by Jacobi power iteration.
pub fn peoplerank_fixed_point(g: &UGraph, d: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut r = vec![1.0 - d; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|u| {
                let s: f64 = g
                    .neighbors(u)
                    .iter()
                    .map(|v| r[v] / g.degree(v) as f64)
                    .sum();
                (1.0 - d) + d * s
            })
            .collect();
        let delta = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r = next;
        if delta < 1e-15 {
            break;
        }
    }
    r
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> UGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    UGraph::from_edges(n, edges)
}

/// Whether a time-respecting journey carries a message from `src`, created
/// at `t0`, to `dst` no later than `deadline`. Breadth-first search over
/// (node, instant) states, where instants are contact endpoints: a state
/// may wait for the next instant or cross any contact open at its instant.
pub fn journey_exists(
    contacts: &[Contact],
    n: usize,
    src: NodeId,
    dst: NodeId,
    t0: SimTime,
    deadline: SimTime,
) -> bool {
    let mut instants: Vec<SimTime> = contacts
        .iter()
        .flat_map(|c| [c.start, c.end])
        .chain([t0])
        .filter(|&t| t >= t0 && t <= deadline)
        .collect();
    instants.sort_unstable();
    instants.dedup();
    let open: Vec<Vec<(usize, usize)>> = instants
        .iter()
        .map(|&t| {
            contacts
                .iter()
                .filter(|c| c.start <= t && t <= c.end)
                .map(|c| (c.a.index(), c.b.index()))
                .collect()
        })
        .collect();
    let mut seen = vec![vec![false; instants.len()]; n];
    let mut queue = VecDeque::from([(src.index(), 0usize)]);
    seen[src.index()][0] = true;
    while let Some((node, i)) = queue.pop_front() {
        if node == dst.index() {
            return true;
        }
        let mut next = Vec::new();
        if i + 1 < instants.len() {
            next.push((node, i + 1));
        }
        for &(a, b) in &open[i] {
            if a == node {
                next.push((b, i));
            } else if b == node {
                next.push((a, i));
            }
        }
        for (m, j) in next {
            if !seen[m][j] {
                seen[m][j] = true;
                queue.push_back((m, j));
            }
        }
    }
    false
}

pub struct Scenario {
    pub contacts: ContactSequence,
    pub workload: WorkloadSequence,
    pub ttl: SimTime,
}

pub const NODES: u32 = 10;

/// Ten labelled nodes, up to a few hundred random contacts and forty
/// messages. Density varies with the seed so that some scenarios leave
/// messages unreachable.
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let duration = 52_000;
    let count = rng.random_range(40..=450);
    let intervals: Vec<Contact> = (0..count)
        .map(|_| {
            let a = rng.random_range(0..NODES);
            let mut b = rng.random_range(0..NODES - 1);
            if b >= a {
                b += 1;
            }
            let start = rng.random_range(0..50_000);
            Contact {
                a: NodeId(a),
                b: NodeId(b),
                start,
                end: start + rng.random_range(1..=1_500),
            }
        })
        .collect();
    let roster = Roster::new(
        (0..NODES)
            .map(|i| (NodeId(i), GroupLabel::new(format!("g{}", i % 3))))
            .collect(),
    );
    let contacts = ContactSequence::from_intervals(intervals, roster, duration).unwrap();
    assert!(contacts.events().len() <= 1000);
    let mut times: Vec<SimTime> = (0..40).map(|_| rng.random_range(0..48_000)).collect();
    times.sort_unstable();
    let entries = times
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let src = rng.random_range(0..NODES);
            let mut dst = rng.random_range(0..NODES - 1);
            if dst >= src {
                dst += 1;
            }
            WorkloadEntry {
                create_time: t,
                id: MessageId(i as u64 + 1),
                src: NodeId(src),
                dst: NodeId(dst),
                size: rng.random_range(1..=5_000),
            }
        })
        .collect();
    Scenario {
        contacts,
        workload: WorkloadSequence::new(entries).unwrap(),
        ttl: rng.random_range(500..15_000),
    }
}

pub fn delivered_set(sim: &Simulation) -> BTreeSet<MessageId> {
    sim.records()
        .iter()
        .filter(|r| r.kind == RecordKind::Delivered)
        .map(|r| r.message)
        .collect()
}

pub fn run_logged(s: &Scenario, cfg: EngineConfig, kind: ProtocolKind, params: &ProtocolParams) -> Simulation {
    let router = build_router(kind, params, s.contacts.roster());
    Simulation::new(cfg, &s.contacts, &s.workload, router)
        .unwrap()
        .with_record_log()
        .run()
}
