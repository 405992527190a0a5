//! k-clique percolation over the familiar graph.

use std::collections::BTreeSet;

use super::graph::{BitSet, UGraph};

/// Maximal cliques via Bron–Kerbosch with Tomita pivoting.
pub fn maximal_cliques(g: &UGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let all: BitSet = (0..g.node_count()).filter(|&v| g.degree(v) > 0).collect();
    let mut r = Vec::new();
    expand(g, &mut r, all, BitSet::default(), &mut out);
    out
}

fn expand(g: &UGraph, r: &mut Vec<usize>, p: BitSet, mut x: BitSet, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| (p.intersection_len(g.neighbors(u)), std::cmp::Reverse(u)))
        .expect("p is non-empty");
    let candidates: Vec<usize> = p.difference(g.neighbors(pivot)).iter().collect();
    let mut p = p;
    for v in candidates {
        let nv = g.neighbors(v);
        r.push(v);
        expand(g, r, p.intersect(nv), x.intersect(nv), out);
        r.pop();
        p.remove(v);
        x.insert(v);
    }
}

/// Communities are unions of k-cliques chained through (k-1)-node overlaps.
///
/// Two maximal cliques of size >= k belong to the same community exactly
/// when they share at least k-1 nodes, so percolating maximal cliques gives
/// the same partition as percolating every k-clique. Members are sorted and
/// communities are returned in lexicographic order.
pub fn kclique_communities(g: &UGraph, k: usize) -> Vec<Vec<usize>> {
    assert!(k >= 2, "k-clique percolation needs k >= 2");
    let cliques: Vec<BitSet> = maximal_cliques(g)
        .into_iter()
        .filter(|c| c.len() >= k)
        .map(|c| c.into_iter().collect())
        .collect();
    let mut parent: Vec<usize> = (0..cliques.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            if cliques[i].intersection_len(&cliques[j]) >= k - 1 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<BitSet> = vec![BitSet::default(); cliques.len()];
    for (i, c) in cliques.iter().enumerate() {
        let root = find(&mut parent, i);
        groups[root].union_with(c);
    }
    let set: BTreeSet<Vec<usize>> = groups
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.iter().collect())
        .collect();
    set.into_iter().collect()
}
