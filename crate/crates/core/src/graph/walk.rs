use std::collections::HashSet;

use thiserror::Error;

use super::{EdgeId, Graph, LinkId, NodeId};

/// A node sequence over links, before any edge has been chosen on them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(Vec<NodeId>);

impl NodePath {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        assert!(!nodes.is_empty(), "a node path has at least one node");
        Self(nodes)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    /// Number of hops.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> NodeId {
        self.0[0]
    }

    pub fn last(&self) -> NodeId {
        *self.0.last().unwrap()
    }

    pub fn interior(&self) -> &[NodeId] {
        if self.0.len() < 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    /// Links traversed, in order. Panics if consecutive nodes are not adjacent.
    pub fn links(&self, g: &Graph) -> Vec<LinkId> {
        self.0
            .windows(2)
            .map(|w| g.link_between(w[0], w[1]).expect("consecutive nodes are adjacent"))
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        Self(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkKind {
    Walk,
    Trail,
    Path,
    ClosedWalk,
    ClosedTrail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Disjointness {
    Edge,
    Link,
    Node,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("a walk needs exactly one more node than edges")]
    Shape,
    #[error("edge {edge} does not join {from} and {to}")]
    NotIncident { edge: String, from: String, to: String },
    #[error("edge {0} exceeds its link capacity")]
    Capacity(String),
}

/// Alternating node/edge sequence `(v0, e1, v1, ..., en, vn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl Walk {
    /// Checks that every edge joins its neighbors in the sequence.
    pub fn new(g: &Graph, nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Result<Walk, WalkError> {
        if nodes.len() != edges.len() + 1 {
            return Err(WalkError::Shape);
        }
        for (i, e) in edges.iter().enumerate() {
            let link = g.link(e.link);
            let (x, y) = (nodes[i], nodes[i + 1]);
            if !(link.has_endpoint(x) && link.has_endpoint(y) && x != y) {
                return Err(WalkError::NotIncident {
                    edge: g.edge_label(*e),
                    from: g.name(x).to_string(),
                    to: g.name(y).to_string(),
                });
            }
            if !link.capacity.admits(e.ordinal) {
                return Err(WalkError::Capacity(g.edge_label(*e)));
            }
        }
        Ok(Walk { nodes, edges })
    }

    /// Assembles a walk whose incidence is already known to hold.
    pub(crate) fn from_parts(nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Walk {
        debug_assert_eq!(nodes.len(), edges.len() + 1);
        Walk { nodes, edges }
    }

    /// A walk of length zero.
    pub fn trivial(n: NodeId) -> Walk {
        Walk {
            nodes: vec![n],
            edges: Vec::new(),
        }
    }

    /// Puts one edge with the given ordinal on each hop of `path`.
    pub fn on_path(g: &Graph, path: &NodePath, ordinals: &[u32]) -> Result<Walk, WalkError> {
        let links = path.links(g);
        if links.len() != ordinals.len() {
            return Err(WalkError::Shape);
        }
        let edges = links
            .into_iter()
            .zip(ordinals)
            .map(|(l, &k)| EdgeId::new(l, k))
            .collect();
        Walk::new(g, path.nodes().to_vec(), edges)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn interior(&self) -> &[NodeId] {
        if self.nodes.len() < 2 {
            &[]
        } else {
            &self.nodes[1..self.nodes.len() - 1]
        }
    }

    pub fn links(&self) -> impl Iterator<Item = LinkId> + '_ {
        self.edges.iter().map(|e| e.link)
    }

    pub fn node_path(&self) -> NodePath {
        NodePath::new(self.nodes.clone())
    }

    pub fn reversed(&self) -> Walk {
        let mut nodes = self.nodes.clone();
        let mut edges = self.edges.clone();
        nodes.reverse();
        edges.reverse();
        Walk { nodes, edges }
    }

    /// Whether the walk connects the two nodes, in either direction.
    pub fn connects(&self, u: NodeId, v: NodeId) -> bool {
        (self.first() == u && self.last() == v) || (self.first() == v && self.last() == u)
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn is_trail(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges.iter().all(|e| seen.insert(*e))
    }

    pub fn is_path(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.nodes.len());
        self.nodes.iter().all(|n| seen.insert(*n))
    }

    /// The most specific classification of the walk.
    pub fn kind(&self) -> WalkKind {
        if self.is_path() {
            WalkKind::Path
        } else if self.is_closed() {
            if self.is_trail() {
                WalkKind::ClosedTrail
            } else {
                WalkKind::ClosedWalk
            }
        } else if self.is_trail() {
            WalkKind::Trail
        } else {
            WalkKind::Walk
        }
    }

    /// Edge-, link- or node-disjointness. Node-disjoint walks are link-disjoint
    /// and no interior node of either walk lies anywhere on the other.
    pub fn disjoint(&self, other: &Walk, mode: Disjointness) -> bool {
        match mode {
            Disjointness::Edge => {
                let mine: HashSet<EdgeId> = self.edges.iter().copied().collect();
                !other.edges.iter().any(|e| mine.contains(e))
            }
            Disjointness::Link => {
                let mine: HashSet<LinkId> = self.links().collect();
                !other.links().any(|l| mine.contains(&l))
            }
            Disjointness::Node => {
                self.disjoint(other, Disjointness::Link)
                    && !self.interior().iter().any(|n| other.nodes.contains(n))
                    && !other.interior().iter().any(|n| self.nodes.contains(n))
            }
        }
    }

    /// Space-separated rendering with edge ordinals, `A @0 B @1 C`.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = g.name(self.nodes[0]).to_string();
        for (e, n) in self.edges.iter().zip(&self.nodes[1..]) {
            out.push_str(&format!(" @{} {}", e.ordinal, g.name(*n)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Capacity, GraphBuilder};

    /// Five nodes, with two parallel edges `e` and `f` on link D-E.
    fn walk_kinds_graph() -> Graph {
        GraphBuilder::new()
            .node("A")
            .node("B")
            .node("C")
            .node("D")
            .node("E")
            .link("A", "B")
            .link("B", "C")
            .link("B", "D")
            .link("C", "D")
            .link_with_capacity("D", "E", Capacity::Finite(2))
            .build()
            .unwrap()
    }

    /// Builds a walk from edge names `a`..`f`.
    fn walk(g: &Graph, seq: &[&str]) -> Walk {
        let edge = |name: &str| {
            let (u, v, k) = match name {
                "a" => ("A", "B", 0),
                "b" => ("B", "C", 0),
                "c" => ("B", "D", 0),
                "d" => ("C", "D", 0),
                "e" => ("D", "E", 0),
                "f" => ("D", "E", 1),
                _ => panic!("unknown edge {name}"),
            };
            EdgeId::new(g.link_between(g.node(u).unwrap(), g.node(v).unwrap()).unwrap(), k)
        };
        let nodes = seq.iter().step_by(2).map(|s| g.node(s).unwrap()).collect();
        let edges = seq.iter().skip(1).step_by(2).map(|s| edge(s)).collect();
        Walk::new(g, nodes, edges).unwrap()
    }

    #[test]
    fn degree_counts_edges_on_links() {
        let g = walk_kinds_graph();
        // D touches links to B, C and E, the last carrying two edges.
        assert_eq!(g.link_degree(g.node("D").unwrap()), 3);
    }

    #[test]
    fn classification() {
        let g = walk_kinds_graph();
        let w = walk(&g, &["C", "d", "D", "f", "E", "e", "D", "d", "C"]);
        assert_eq!(w.kind(), WalkKind::ClosedWalk);
        assert!(!w.is_trail());
        let t = walk(&g, &["C", "d", "D", "f", "E", "e", "D", "c", "B", "b", "C"]);
        assert_eq!(t.kind(), WalkKind::ClosedTrail);
        assert!(!t.is_path());
        let open = walk(&g, &["C", "d", "D", "f", "E", "e", "D", "c", "B"]);
        assert_eq!(open.kind(), WalkKind::Trail);
        let back = walk(&g, &["C", "d", "D", "d", "C", "b", "B"]);
        assert_eq!(back.kind(), WalkKind::Walk);
        let single = Walk::trivial(g.node("A").unwrap());
        assert_eq!(single.kind(), WalkKind::Path);
        assert_eq!(single.len(), 0);
    }

    #[test]
    fn disjointness_examples() {
        let g = walk_kinds_graph();
        let de = walk(&g, &["D", "e", "E"]);
        let df = walk(&g, &["D", "f", "E"]);
        assert!(de.disjoint(&df, Disjointness::Edge));
        assert!(!de.disjoint(&df, Disjointness::Link));
        assert!(!de.disjoint(&df, Disjointness::Node));

        let abc = walk(&g, &["A", "a", "B", "b", "C"]);
        let edc = walk(&g, &["E", "e", "D", "d", "C"]);
        assert!(abc.disjoint(&edc, Disjointness::Node));

        let abd = walk(&g, &["A", "a", "B", "c", "D"]);
        let cb = walk(&g, &["C", "b", "B"]);
        assert!(!abd.disjoint(&cb, Disjointness::Node));
        assert!(!cb.disjoint(&abd, Disjointness::Node));
        assert!(abd.disjoint(&cb, Disjointness::Link));
    }

    #[test]
    fn rejects_non_incident_edges() {
        let g = walk_kinds_graph();
        let a = g.node("A").unwrap();
        let c = g.node("C").unwrap();
        let ab = g.link_between(a, g.node("B").unwrap()).unwrap();
        assert!(matches!(
            Walk::new(&g, vec![a, c], vec![EdgeId::new(ab, 0)]),
            Err(WalkError::NotIncident { .. })
        ));
        let d = g.node("D").unwrap();
        let e = g.node("E").unwrap();
        let de = g.link_between(d, e).unwrap();
        assert!(matches!(
            Walk::new(&g, vec![d, e], vec![EdgeId::new(de, 2)]),
            Err(WalkError::Capacity(_))
        ));
        assert_eq!(Walk::new(&g, vec![d], vec![EdgeId::new(de, 0)]), Err(WalkError::Shape));
    }
}
