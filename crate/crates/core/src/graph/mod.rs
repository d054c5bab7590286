//! Undirected multigraph model.
//!
//! A [`Graph`] is a set of named nodes and a set of links. A link joins two
//! distinct nodes and stands for a pool of parallel edges (link connections);
//! its [`Capacity`] bounds how many edges may ever be materialized on it.
//! Edges themselves are not stored here: they are materialized on demand by
//! whoever owns the allocation state (see [`crate::plan`]), so a `Graph` is
//! immutable once built and can be shared freely.
//!
//! Node indices are assigned in lexicographic order of the node names, so
//! comparing [`NodeId`]s compares names. Every deterministic tie-break in the
//! crate relies on this.

mod topology;
mod walk;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use topology::{default_large_nodes, standard_topology, Topology, TOPOLOGY_NAMES};
pub use walk::{Disjointness, NodePath, Walk, WalkError, WalkKind};

/// Index of a node. Ordering matches lexicographic order of node names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a link. Links are ordered by their (smaller, larger) endpoint pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(pub u32);

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One link connection: the `ordinal`-th edge of a link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub link: LinkId,
    pub ordinal: u32,
}

impl EdgeId {
    pub fn new(link: LinkId, ordinal: u32) -> Self {
        Self { link, ordinal }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

impl Capacity {
    /// Whether an edge with this ordinal may exist on the link.
    pub fn admits(self, ordinal: u32) -> bool {
        match self {
            Capacity::Finite(c) => ordinal < c,
            Capacity::Unbounded => true,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// A link between two distinct nodes, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: Capacity,
}

impl Link {
    pub fn has_endpoint(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }

    /// The endpoint opposite to `n`. `n` must be an endpoint.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            debug_assert_eq!(self.b, n);
            self.a
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid node id `{0}`")]
    InvalidNodeId(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate link {0}-{1}")]
    DuplicateLink(String, String),
    #[error("self-loop link at `{0}`")]
    SelfLoop(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("link {0}-{1} has zero capacity")]
    ZeroCapacity(String, String),
    #[error("unknown topology `{0}`")]
    UnknownTopology(String),
    #[error("topology `{0}` has no built-in fixture and needs a data file")]
    MissingTopologyData(String),
    #[error("graph is disconnected")]
    Disconnected,
}

impl GraphError {
    fn at(self, line: usize) -> Self {
        GraphError::Line {
            line,
            source: Box::new(self),
        }
    }
}

/// Node ids are restricted so that plan and traffic files stay unambiguous.
pub fn is_valid_node_id(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('@')
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '(' | ')' | ','))
}

/// Collects nodes and links in any order; [`GraphBuilder::build`] assigns ids.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<String>,
    links: Vec<(String, String, Capacity)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, name: &str) -> Self {
        self.nodes.push(name.to_string());
        self
    }

    pub fn link(mut self, u: &str, v: &str) -> Self {
        self.links.push((u.to_string(), v.to_string(), Capacity::Unbounded));
        self
    }

    pub fn link_with_capacity(mut self, u: &str, v: &str, capacity: Capacity) -> Self {
        self.links.push((u.to_string(), v.to_string(), capacity));
        self
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        let nodes = self.nodes.into_iter().map(|n| (n, 0)).collect();
        let links = self
            .links
            .into_iter()
            .map(|(u, v, c)| (u, v, c, 0))
            .collect();
        Graph::assemble(nodes, links)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    links: Vec<Link>,
    link_index: HashMap<(NodeId, NodeId), LinkId>,
    /// Per node: (neighbor, link), sorted by neighbor.
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
}

impl Graph {
    /// Builds a graph from (name, line) nodes and (u, v, capacity, line)
    /// links. Line 0 means "not from a file" and is not reported.
    fn assemble(
        nodes: Vec<(String, usize)>,
        links: Vec<(String, String, Capacity, usize)>,
    ) -> Result<Graph, GraphError> {
        let wrap = |e: GraphError, line: usize| if line > 0 { e.at(line) } else { e };

        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (name, line) in &nodes {
            if !is_valid_node_id(name) {
                return Err(wrap(GraphError::InvalidNodeId(name.clone()), *line));
            }
            if seen.insert(name.as_str(), *line).is_some() {
                return Err(wrap(GraphError::DuplicateNode(name.clone()), *line));
            }
        }
        let mut names: Vec<String> = nodes.into_iter().map(|(n, _)| n).collect();
        names.sort();
        let index: HashMap<String, NodeId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NodeId(i as u32)))
            .collect();

        let mut pairs = Vec::with_capacity(links.len());
        let mut dedup = HashMap::new();
        for (u, v, capacity, line) in links {
            let nu = *index
                .get(&u)
                .ok_or_else(|| wrap(GraphError::UnknownNode(u.clone()), line))?;
            let nv = *index
                .get(&v)
                .ok_or_else(|| wrap(GraphError::UnknownNode(v.clone()), line))?;
            if nu == nv {
                return Err(wrap(GraphError::SelfLoop(u), line));
            }
            if capacity == Capacity::Finite(0) {
                return Err(wrap(GraphError::ZeroCapacity(u, v), line));
            }
            let key = (nu.min(nv), nu.max(nv));
            if dedup.insert(key, ()).is_some() {
                return Err(wrap(GraphError::DuplicateLink(u, v), line));
            }
            pairs.push((key, capacity));
        }
        pairs.sort_by_key(|(k, _)| *k);

        let mut links = Vec::with_capacity(pairs.len());
        let mut link_index = HashMap::with_capacity(pairs.len());
        let mut adjacency = vec![Vec::new(); names.len()];
        for (i, ((a, b), capacity)) in pairs.into_iter().enumerate() {
            let id = LinkId(i as u32);
            links.push(Link { a, b, capacity });
            link_index.insert((a, b), id);
            adjacency[a.index()].push((b, id));
            adjacency[b.index()].push((a, id));
        }
        for adj in &mut adjacency {
            adj.sort();
        }

        Ok(Graph {
            names,
            index,
            links,
            link_index,
            adjacency,
        })
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// node <id>
    /// link <u> <v> [<capacity>|unbounded]
    /// ```
    ///
    /// Lines may appear in any order.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut nodes = Vec::new();
        let mut links = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens.as_slice() {
                [] => {}
                ["node", id] => nodes.push((id.to_string(), line)),
                ["link", u, v] => links.push((u.to_string(), v.to_string(), Capacity::Unbounded, line)),
                ["link", u, v, cap] => {
                    let capacity = if *cap == "unbounded" {
                        Capacity::Unbounded
                    } else {
                        cap.parse::<u32>().map(Capacity::Finite).map_err(|_| {
                            GraphError::Syntax(format!("bad capacity `{cap}`")).at(line)
                        })?
                    };
                    links.push((u.to_string(), v.to_string(), capacity, line));
                }
                [kw, ..] => {
                    return Err(GraphError::Syntax(format!("unexpected `{}`", kw)).at(line));
                }
            }
        }
        Graph::assemble(nodes, links)
    }

    /// Renders the graph in the format accepted by [`Graph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            out.push_str(&format!("node {n}\n"));
        }
        for l in &self.links {
            out.push_str(&format!("link {} {}", self.name(l.a), self.name(l.b)));
            if let Capacity::Finite(c) = l.capacity {
                out.push_str(&format!(" {c}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn links(&self) -> impl Iterator<Item = (LinkId, &Link)> + '_ {
        self.links
            .iter()
            .enumerate()
            .map(|(i, l)| (LinkId(i as u32), l))
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    /// Looks up a node by name, failing with [`GraphError::UnknownNode`].
    pub fn require(&self, name: &str) -> Result<NodeId, GraphError> {
        self.node(name)
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<LinkId> {
        self.link_index.get(&(u.min(v), u.max(v))).copied()
    }

    /// Neighbors of `n` with the connecting link, in node order.
    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[n.index()]
    }

    pub fn link_degree(&self, n: NodeId) -> usize {
        self.adjacency[n.index()].len()
    }

    /// Human-readable edge label, `u/v@k`.
    pub fn edge_label(&self, e: EdgeId) -> String {
        let l = self.link(e.link);
        format!("{}/{}@{}", self.name(l.a), self.name(l.b), e.ordinal)
    }

    /// Parses an edge label produced by [`Graph::edge_label`].
    pub fn parse_edge_label(&self, s: &str) -> Option<EdgeId> {
        let (pair, ordinal) = s.rsplit_once('@')?;
        let (u, v) = pair.split_once('/')?;
        let link = self.link_between(self.node(u)?, self.node(v)?)?;
        Some(EdgeId::new(link, ordinal.parse().ok()?))
    }

    /// Hop distances from `src` over links accepted by `usable`.
    pub fn bfs_distances(&self, src: NodeId, usable: impl Fn(LinkId) -> bool) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        dist[src.index()] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x.index()].unwrap();
            for &(y, l) in self.neighbors(x) {
                if dist[y.index()].is_none() && usable(l) {
                    dist[y.index()] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Minimum-hop path from `u` to `v` over links accepted by `usable`.
    ///
    /// Among all minimum-hop paths the one with the lexicographically
    /// smallest node sequence is returned.
    pub fn shortest_path(
        &self,
        u: NodeId,
        v: NodeId,
        usable: impl Fn(LinkId) -> bool,
    ) -> Option<NodePath> {
        // Distances to the target let us walk forward greedily, always
        // taking the smallest neighbor that stays on a shortest path.
        let to_target = self.bfs_distances(v, &usable);
        let mut d = to_target[u.index()]?;
        let mut nodes = vec![u];
        let mut x = u;
        while d > 0 {
            let &(y, _) = self
                .neighbors(x)
                .iter()
                .find(|&&(y, l)| usable(l) && to_target[y.index()] == Some(d - 1))
                .expect("bfs layers are consistent");
            nodes.push(y);
            x = y;
            d -= 1;
        }
        Some(NodePath::new(nodes))
    }

    /// Every minimum-hop path from `u` to `v` over usable links, in
    /// lexicographic order of node sequences.
    pub fn all_shortest_paths(
        &self,
        u: NodeId,
        v: NodeId,
        usable: impl Fn(LinkId) -> bool,
    ) -> Vec<NodePath> {
        let to_target = self.bfs_distances(v, &usable);
        let Some(d) = to_target[u.index()] else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack = vec![u];
        self.extend_shortest(&to_target, &usable, d, &mut stack, &mut out);
        out
    }

    fn extend_shortest(
        &self,
        to_target: &[Option<u32>],
        usable: &impl Fn(LinkId) -> bool,
        d: u32,
        stack: &mut Vec<NodeId>,
        out: &mut Vec<NodePath>,
    ) {
        if d == 0 {
            out.push(NodePath::new(stack.clone()));
            return;
        }
        let x = *stack.last().unwrap();
        for &(y, l) in self.neighbors(x) {
            if usable(l) && to_target[y.index()] == Some(d - 1) {
                stack.push(y);
                self.extend_shortest(to_target, usable, d - 1, stack, out);
                stack.pop();
            }
        }
    }

    /// Sum of hop distances over unordered node pairs.
    pub fn distance_sum(&self) -> Result<u64, GraphError> {
        let mut total = 0u64;
        for u in self.nodes() {
            for (i, d) in self.bfs_distances(u, |_| true).into_iter().enumerate() {
                let d = d.ok_or(GraphError::Disconnected)?;
                if i > u.index() {
                    total += u64::from(d);
                }
            }
        }
        Ok(total)
    }

    /// Length of the shortest cycle, if any.
    pub fn girth(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for src in self.nodes() {
            let mut dist = vec![u32::MAX; self.node_count()];
            let mut parent_link = vec![None; self.node_count()];
            dist[src.index()] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(x) = queue.pop_front() {
                for &(y, l) in self.neighbors(x) {
                    if parent_link[x.index()] == Some(l) {
                        continue;
                    }
                    if dist[y.index()] == u32::MAX {
                        dist[y.index()] = dist[x.index()] + 1;
                        parent_link[y.index()] = Some(l);
                        queue.push_back(y);
                    } else {
                        let c = dist[x.index()] + dist[y.index()] + 1;
                        best = Some(best.map_or(c, |b| b.min(c)));
                    }
                }
            }
        }
        best
    }
}
