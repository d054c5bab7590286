//! The auxiliary graph on which protection routes are searched.

use std::collections::BTreeSet;

use super::subtrail::Subtrail;
use crate::cdijkstra::RivalGraph;
use crate::graph::{EdgeId, Graph, LinkId, NodeId};

/// Weight of one new edge. A shortcut weighs 1, so the search minimizes new
/// edges first and the number of shortcuts second.
pub const NEW_EDGE_WEIGHT: u64 = 1 << 16;
pub const SHORTCUT_WEIGHT: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxArcKind {
    /// One fresh edge on the link.
    Unused { link: LinkId },
    /// A whole subtrail, traversed backwards if `reversed`.
    Shortcut { subtrail: usize, reversed: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub kind: AuxArcKind,
    /// Nodes of the expansion in `G`, from tail to head.
    pub expansion: Vec<NodeId>,
}

impl AuxArc {
    pub fn weight(&self) -> u64 {
        match self.kind {
            AuxArcKind::Unused { .. } => NEW_EDGE_WEIGHT,
            AuxArcKind::Shortcut { .. } => SHORTCUT_WEIGHT,
        }
    }

    pub fn is_shortcut(&self) -> bool {
        matches!(self.kind, AuxArcKind::Shortcut { .. })
    }
}

#[derive(Clone, Debug)]
pub struct AuxGraph {
    pub source: NodeId,
    pub target: NodeId,
    pub subtrails: Vec<Subtrail>,
    pub arcs: Vec<AuxArc>,
    /// Symmetric rival lists, by arc index.
    pub rivals: Vec<Vec<usize>>,
}

impl AuxGraph {
    /// Adds arcs for the given unused links (both directions) and subtrails
    /// (both directions, loops dropped), then computes rivals: two arcs are
    /// rivals if their expansions share a node other than a common endpoint.
    pub fn new(
        g: &Graph,
        source: NodeId,
        target: NodeId,
        unused_links: &[LinkId],
        subtrails: Vec<Subtrail>,
    ) -> AuxGraph {
        let mut arcs = Vec::new();
        for &l in unused_links {
            let link = g.link(l);
            for (a, b) in [(link.a, link.b), (link.b, link.a)] {
                arcs.push(AuxArc {
                    tail: a,
                    head: b,
                    kind: AuxArcKind::Unused { link: l },
                    expansion: vec![a, b],
                });
            }
        }
        for (i, s) in subtrails.iter().enumerate() {
            let (a, b) = (s.walk.first(), s.walk.last());
            if a == b {
                continue;
            }
            for reversed in [false, true] {
                let mut expansion = s.walk.nodes().to_vec();
                if reversed {
                    expansion.reverse();
                }
                arcs.push(AuxArc {
                    tail: expansion[0],
                    head: *expansion.last().unwrap(),
                    kind: AuxArcKind::Shortcut {
                        subtrail: i,
                        reversed,
                    },
                    expansion,
                });
            }
        }

        let sets: Vec<BTreeSet<NodeId>> = arcs
            .iter()
            .map(|a| a.expansion.iter().copied().collect())
            .collect();
        let mut rivals = vec![Vec::new(); arcs.len()];
        for i in 0..arcs.len() {
            for j in i + 1..arcs.len() {
                let (a, b) = (&arcs[i], &arcs[j]);
                let common_end = |n: NodeId| {
                    (n == a.tail || n == a.head) && (n == b.tail || n == b.head)
                };
                if sets[i].intersection(&sets[j]).any(|&n| !common_end(n)) {
                    rivals[i].push(j);
                    rivals[j].push(i);
                }
            }
        }
        AuxGraph {
            source,
            target,
            subtrails,
            arcs,
            rivals,
        }
    }

    pub fn unused_count(&self) -> usize {
        self.arcs.iter().filter(|a| !a.is_shortcut()).count()
    }

    pub fn shortcut_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.is_shortcut()).count()
    }

    pub fn rival_pairs(&self) -> usize {
        self.rivals.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn are_rivals(&self, a: usize, b: usize) -> bool {
        self.rivals[a].contains(&b)
    }

    /// The search graph: node indices equal `NodeId`s, arc indices equal
    /// this graph's arc indices.
    pub fn to_rival_graph(&self, g: &Graph) -> RivalGraph {
        let names = g.nodes().map(|n| g.name(n).to_string()).collect();
        let mut rg = RivalGraph::with_names(names, self.source.index());
        for a in &self.arcs {
            rg.add_arc(a.tail.index(), a.head.index(), a.weight());
        }
        for (i, rs) in self.rivals.iter().enumerate() {
            for &j in rs {
                rg.add_rival(i, j);
            }
        }
        rg
    }

    /// Edges of the expansion of an arc; unused arcs take `fresh(link)`.
    pub fn expand_edges(&self, arc: usize, fresh: impl Fn(LinkId) -> EdgeId) -> Vec<EdgeId> {
        let a = &self.arcs[arc];
        match a.kind {
            AuxArcKind::Unused { link } => vec![fresh(link)],
            AuxArcKind::Shortcut { subtrail, reversed } => {
                let mut edges = self.subtrails[subtrail].walk.edges().to_vec();
                if reversed {
                    edges.reverse();
                }
                edges
            }
        }
    }

    /// Cost of an arc sequence.
    pub fn cost(&self, path: &[usize]) -> u64 {
        path.iter().map(|&a| self.arcs[a].weight()).sum()
    }

    /// All admissible node-simple arc sequences from source to target whose
    /// cost equals `cost`, found by depth-first search pruned with lower
    /// bounds. Returns `None` if more than `budget` steps would be needed.
    pub fn optimal_paths(&self, node_count: usize, cost: u64, budget: u64) -> Option<Vec<Vec<usize>>> {
        let bound = self.lower_bounds(node_count);
        let mut out_arcs = vec![Vec::new(); node_count];
        for (i, a) in self.arcs.iter().enumerate() {
            out_arcs[a.tail.index()].push(i);
        }
        let mut state = Dfs {
            aux: self,
            out_arcs: &out_arcs,
            bound: &bound,
            cost,
            budget,
            steps: 0,
            path: Vec::new(),
            visited: vec![false; node_count],
            forbidden: vec![0u32; self.arcs.len()],
            found: Vec::new(),
        };
        state.visited[self.source.index()] = true;
        state.go(self.source, 0).then_some(state.found)
    }

    /// Unconstrained distances to the target, a lower bound for any
    /// admissible continuation.
    fn lower_bounds(&self, node_count: usize) -> Vec<Option<u64>> {
        let mut dist: Vec<Option<u64>> = vec![None; node_count];
        dist[self.target.index()] = Some(0);
        // Bellman-Ford style relaxation; graphs here are tiny.
        loop {
            let mut changed = false;
            for a in &self.arcs {
                if let Some(dh) = dist[a.head.index()] {
                    let cand = dh + a.weight();
                    if dist[a.tail.index()].map_or(true, |dt| cand < dt) {
                        dist[a.tail.index()] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }
}

struct Dfs<'a> {
    aux: &'a AuxGraph,
    out_arcs: &'a [Vec<usize>],
    bound: &'a [Option<u64>],
    cost: u64,
    budget: u64,
    steps: u64,
    path: Vec<usize>,
    visited: Vec<bool>,
    /// How many arcs on the current path forbid each arc.
    forbidden: Vec<u32>,
    found: Vec<Vec<usize>>,
}

impl Dfs<'_> {
    /// Returns false if the budget ran out.
    fn go(&mut self, at: NodeId, spent: u64) -> bool {
        if at == self.aux.target {
            if spent == self.cost {
                self.found.push(self.path.clone());
            }
            return true;
        }
        for &i in &self.out_arcs[at.index()] {
            self.steps += 1;
            if self.steps > self.budget {
                return false;
            }
            let a = &self.aux.arcs[i];
            let head = a.head.index();
            if self.visited[head] || self.forbidden[i] > 0 {
                continue;
            }
            let spent2 = spent + a.weight();
            match self.bound[head] {
                Some(b) if spent2 + b <= self.cost => {}
                _ => continue,
            }
            self.visited[head] = true;
            self.path.push(i);
            for &r in &self.aux.rivals[i] {
                self.forbidden[r] += 1;
            }
            let ok = self.go(a.head, spent2);
            for &r in &self.aux.rivals[i] {
                self.forbidden[r] -= 1;
            }
            self.path.pop();
            self.visited[head] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}
