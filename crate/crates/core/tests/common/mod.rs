//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use pxt_core::cdijkstra::RivalGraph;
use pxt_core::traffic::SplitMix64;

/// Shortest admissible length to every node by enumerating all simple paths
/// from the source. Rivals are checked in both listing directions, so the
/// input need not be symmetric.
pub fn brute_force_lengths(g: &RivalGraph) -> Vec<Option<u64>> {
    let n = g.node_count();
    let mut best = vec![None; n];
    let mut on_path = vec![false; n];
    let mut arcs = Vec::new();
    fn rivals(g: &RivalGraph, a: usize, b: usize) -> bool {
        g.arc(a).rivals.contains(&b) || g.arc(b).rivals.contains(&a)
    }
    fn dfs(
        g: &RivalGraph,
        node: usize,
        length: u64,
        on_path: &mut [bool],
        arcs: &mut Vec<usize>,
        best: &mut [Option<u64>],
    ) {
        if best[node].is_none_or(|b| length < b) {
            best[node] = Some(length);
        }
        for &a in g.out_arcs(node) {
            let arc = g.arc(a);
            if on_path[arc.head] || arcs.iter().any(|&b| rivals(g, a, b)) {
                continue;
            }
            on_path[arc.head] = true;
            arcs.push(a);
            dfs(g, arc.head, length + arc.length, on_path, arcs, best);
            arcs.pop();
            on_path[arc.head] = false;
        }
    }
    on_path[g.source] = true;
    dfs(g, g.source, 0, &mut on_path, &mut arcs, &mut best);
    best
}

/// Textbook Dijkstra with a binary heap, ignoring rivals.
pub fn classic_dijkstra(g: &RivalGraph) -> Vec<Option<u64>> {
    let mut dist: Vec<Option<u64>> = vec![None; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[g.source] = Some(0);
    heap.push(Reverse((0u64, g.source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|x| x < d) {
            continue;
        }
        for &a in g.out_arcs(u) {
            let arc = g.arc(a);
            let nd = d + arc.length;
            if dist[arc.head].is_none_or(|x| nd < x) {
                dist[arc.head] = Some(nd);
                heap.push(Reverse((nd, arc.head)));
            }
        }
    }
    dist
}

/// Checks that `path` starts at the source, is connected, ends at `target`,
/// repeats no node and uses no rival pair; returns its length.
pub fn check_path(g: &RivalGraph, path: &[usize], target: usize) -> Result<u64, String> {
    let mut at = g.source;
    let mut seen = vec![g.source];
    let mut length = 0;
    for (i, &a) in path.iter().enumerate() {
        let arc = g.arc(a);
        if arc.tail != at {
            return Err(format!("arc {a} does not continue the path"));
        }
        if seen.contains(&arc.head) {
            return Err(format!("node {} repeated", arc.head));
        }
        for &b in &path[..i] {
            if g.arc(a).rivals.contains(&b) || g.arc(b).rivals.contains(&a) {
                return Err(format!("arcs {b} and {a} are rivals"));
            }
        }
        seen.push(arc.head);
        at = arc.head;
        length += arc.length;
    }
    if at != target {
        return Err(format!("path ends at {at}, not {target}"));
    }
    Ok(length)
}

/// A random instance with at most `max_nodes` nodes, `max_arcs` arcs and
/// `max_rivals` rival pairs (some listed one way only).
pub fn random_rival_graph(rng: &mut SplitMix64, max_nodes: u64, max_arcs: u64, max_rivals: u64) -> RivalGraph {
    let n = 2 + rng.below(max_nodes - 1) as usize;
    let mut g = RivalGraph::new(n, rng.below(n as u64) as usize);
    let m = 1 + rng.below(max_arcs);
    for _ in 0..m {
        let t = rng.below(n as u64) as usize;
        let mut h = rng.below(n as u64 - 1) as usize;
        if h >= t {
            h += 1;
        }
        g.add_arc(t, h, rng.below(10));
    }
    let arcs = g.arcs().len() as u64;
    if arcs >= 2 {
        for _ in 0..rng.below(max_rivals + 1) {
            let a = rng.below(arcs) as usize;
            let b = rng.below(arcs) as usize;
            if a != b {
                g.add_rival(a, b);
            }
        }
    }
    g
}

/// A random graph without any rival pairs.
pub fn random_plain_graph(rng: &mut SplitMix64, max_nodes: u64, max_arcs: u64) -> RivalGraph {
    random_rival_graph(rng, max_nodes, max_arcs, 0)
}
