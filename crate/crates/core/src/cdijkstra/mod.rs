//! Constrained Dijkstra: single-source shortest *admissible* paths in a
//! directed graph where each arc may list rival arcs that must never appear
//! on the same path.
//!
//! Every node keeps a list of partial paths `(p, l, F, state)`: the path, its
//! length, the forbidden arcs (union of the rivals of its arcs) and whether it
//! is penciled or inked in. A partial path is dropped if another one at the
//! same node is no longer and forbids a subset of its arcs. The first partial
//! path extracted at a node is inked in and is that node's answer.
//!
//! The number of partial paths can grow exponentially (see
//! [`reflection_grid`]), so the search runs under [`SearchLimits`] and fails
//! with [`CdError::Limit`] when they are exceeded.

mod store;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use thiserror::Error;

use store::{Label, Store};

pub type ArcId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RivalArc {
    pub tail: usize,
    pub head: usize,
    pub length: u64,
    pub rivals: Vec<ArcId>,
    pub name: Option<String>,
}

/// Directed graph with nonnegative arc lengths and rival lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RivalGraph {
    node_names: Vec<String>,
    arcs: Vec<RivalArc>,
    out: Vec<Vec<ArcId>>,
    pub source: usize,
}

impl RivalGraph {
    /// Nodes are named by their index.
    pub fn new(node_count: usize, source: usize) -> Self {
        Self::with_names((0..node_count).map(|i| i.to_string()).collect(), source)
    }

    pub fn with_names(node_names: Vec<String>, source: usize) -> Self {
        let n = node_names.len();
        Self {
            node_names,
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
            source,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, n: usize) -> &str {
        &self.node_names[n]
    }

    pub fn arcs(&self) -> &[RivalArc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcId) -> &RivalArc {
        &self.arcs[a]
    }

    pub fn out_arcs(&self, n: usize) -> &[ArcId] {
        &self.out[n]
    }

    pub fn arc_name(&self, a: ArcId) -> String {
        self.arcs[a].name.clone().unwrap_or_else(|| format!("#{a}"))
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, length: u64) -> ArcId {
        let id = self.arcs.len();
        self.arcs.push(RivalArc {
            tail,
            head,
            length,
            rivals: Vec::new(),
            name: None,
        });
        if let Some(out) = self.out.get_mut(tail) {
            out.push(id);
        }
        id
    }

    pub fn add_named_arc(&mut self, name: &str, tail: usize, head: usize, length: u64) -> ArcId {
        let id = self.add_arc(tail, head, length);
        self.arcs[id].name = Some(name.to_string());
        id
    }

    /// Records `b` as a rival of `a` (one direction only).
    pub fn add_rival(&mut self, a: ArcId, b: ArcId) {
        if !self.arcs[a].rivals.contains(&b) {
            self.arcs[a].rivals.push(b);
        }
    }

    fn check(&self) -> Result<(), CdError> {
        let n = self.node_count();
        if self.source >= n {
            return Err(CdError::UnknownNode(self.source));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.tail >= n || a.head >= n {
                return Err(CdError::UnknownNode(a.tail.max(a.head)));
            }
            if let Some(&r) = a.rivals.iter().find(|&&r| r >= self.arcs.len()) {
                return Err(CdError::UnknownRival { arc: i, rival: r });
            }
        }
        Ok(())
    }

    /// Makes the rival relation symmetric. Admissibility is unchanged.
    pub fn symmetrize(&mut self) -> Result<(), CdError> {
        self.check()?;
        for a in 0..self.arcs.len() {
            for k in 0..self.arcs[a].rivals.len() {
                let b = self.arcs[a].rivals[k];
                self.add_rival(b, a);
            }
        }
        for arc in &mut self.arcs {
            arc.rivals.sort_unstable();
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs
            .iter()
            .enumerate()
            .all(|(a, arc)| arc.rivals.iter().all(|&b| self.arcs[b].rivals.contains(&a)))
    }

    /// Whether no arc of `path` has a rival in `path`.
    pub fn is_admissible(&self, path: &[ArcId]) -> bool {
        let set: BTreeSet<ArcId> = path.iter().copied().collect();
        path.iter()
            .all(|&a| self.arcs[a].rivals.iter().all(|r| !set.contains(r)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_partial_paths: usize,
    pub max_work: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_partial_paths: 1_000_000,
            max_work: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathState {
    Penciled,
    Inked,
}

/// A partial path, materialized for inspection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialPath {
    pub arcs: Vec<ArcId>,
    pub length: u64,
    pub forbidden: BTreeSet<ArcId>,
    pub state: PathState,
}

impl PartialPath {
    /// `self` is no longer than `other` and forbids no arc `other` allows.
    pub fn dominates(&self, other: &PartialPath) -> bool {
        self.length <= other.length && self.forbidden.is_subset(&other.forbidden)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    PartialPaths,
    Work,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::PartialPaths => "stored partial paths",
            LimitKind::Work => "work units",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeResult {
    Reached { arcs: Vec<ArcId>, length: u64 },
    Unreachable,
    /// The search stopped before deciding this node.
    Undecided,
}

impl NodeResult {
    pub fn length(&self) -> Option<u64> {
        match self {
            NodeResult::Reached { length, .. } => Some(*length),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub stored: usize,
    pub work: u64,
    pub extracted: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub results: Vec<NodeResult>,
    pub stats: SearchStats,
    /// One line per step when tracing was requested.
    pub trace: Vec<String>,
}

impl Solution {
    pub fn length(&self, n: usize) -> Option<u64> {
        self.results[n].length()
    }

    pub fn path(&self, n: usize) -> Option<&[ArcId]> {
        match &self.results[n] {
            NodeResult::Reached { arcs, .. } => Some(arcs),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdError {
    #[error("arc {arc} lists unknown rival {rival}")]
    UnknownRival { arc: ArcId, rival: ArcId },
    #[error("node {0} out of range")]
    UnknownNode(usize),
    #[error("search limit exceeded: {limit}")]
    Limit {
        limit: LimitKind,
        partial: Box<Solution>,
    },
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub limits: SearchLimits,
    /// Domination pruning; turning it off only costs time and memory.
    pub pruning: bool,
    /// Stop as soon as this node is inked in.
    pub target: Option<usize>,
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            limits: SearchLimits::default(),
            pruning: true,
            target: None,
            trace: false,
        }
    }
}

pub fn solve(g: &RivalGraph, limits: SearchLimits) -> Result<Solution, CdError> {
    solve_with(
        g,
        &SolveOptions {
            limits,
            ..SolveOptions::default()
        },
    )
}

/// Runs the search. The rival relation is symmetrized on a copy if needed.
pub fn solve_with(g: &RivalGraph, opts: &SolveOptions) -> Result<Solution, CdError> {
    g.check()?;
    if !g.is_symmetric() {
        let mut sym = g.clone();
        sym.symmetrize()?;
        return Search::new(&sym, opts).run();
    }
    Search::new(g, opts).run()
}

struct Search<'a> {
    g: &'a RivalGraph,
    opts: &'a SolveOptions,
    store: Store,
    /// (length, |F|, node, seq) — seq is the label id, i.e. creation order.
    heap: BinaryHeap<Reverse<(u64, usize, usize, u32)>>,
    inked: Vec<Option<u32>>,
    black: usize,
    stats: SearchStats,
    trace: Vec<String>,
}

impl<'a> Search<'a> {
    fn new(g: &'a RivalGraph, opts: &'a SolveOptions) -> Self {
        Self {
            g,
            opts,
            store: Store::new(g.node_count()),
            heap: BinaryHeap::new(),
            inked: vec![None; g.node_count()],
            black: 0,
            stats: SearchStats::default(),
            trace: Vec::new(),
        }
    }

    fn run(mut self) -> Result<Solution, CdError> {
        let src = self.g.source;
        let root = self.store.push(Label::root(src));
        self.store.insert_at_node(root);
        self.ink(root);
        self.stats.stored = 1;
        let mut active = Some(root);

        while let Some(p) = active {
            if self.black == self.g.node_count() || self.opts.target.is_some_and(|t| self.inked[t].is_some()) {
                break;
            }
            self.probe(p)?;
            active = self.next_active();
        }
        Ok(self.finish())
    }

    fn ink(&mut self, id: u32) {
        let node = self.store.label(id).node;
        self.store.label_mut(id).state = PathState::Inked;
        self.inked[node] = Some(id);
        self.black += 1;
    }

    fn next_active(&mut self) -> Option<u32> {
        while let Some(Reverse((_, _, node, id))) = self.heap.pop() {
            if !self.store.label(id).alive {
                continue;
            }
            self.stats.extracted += 1;
            let white = self.inked[node].is_none();
            if white {
                self.ink(id);
            }
            if self.opts.trace {
                let line = format!(
                    "active {} {} {}",
                    self.g.node_name(node),
                    self.describe(id),
                    if white { "inked" } else { "penciled" }
                );
                self.trace.push(line);
            }
            return Some(id);
        }
        None
    }

    fn probe(&mut self, p: u32) -> Result<(), CdError> {
        let u = self.store.label(p).node;
        for &e in self.g.out_arcs(u) {
            self.stats.work += 1;
            if self.stats.work > self.opts.limits.max_work {
                return Err(self.fail(LimitKind::Work));
            }
            let label = self.store.label(p);
            if label.forbids(e) {
                continue;
            }
            let arc = self.g.arc(e);
            if self.store.visits(p, arc.head) {
                continue;
            }
            let child = Label::extend(label, p, e, arc.head, arc.length, &arc.rivals);
            if self.opts.pruning && self.store.dominated(&child) {
                if self.opts.trace {
                    self.trace.push(format!("  probe {} -> {} dominated", self.g.arc_name(e), self.g.node_name(arc.head)));
                }
                continue;
            }
            if self.store.len() >= self.opts.limits.max_partial_paths {
                return Err(self.fail(LimitKind::PartialPaths));
            }
            let key = (child.length, child.forbidden.len(), child.node);
            let id = self.store.push(child);
            self.stats.stored = self.store.len();
            self.store.insert_at_node(id);
            self.heap.push(Reverse((key.0, key.1, key.2, id)));
            if self.opts.pruning {
                self.store.prune_dominated_by(id);
            }
            if self.opts.trace {
                let line = format!("  probe {} -> {} {}", self.g.arc_name(e), self.g.node_name(arc.head), self.describe(id));
                self.trace.push(line);
            }
        }
        Ok(())
    }

    fn describe(&self, id: u32) -> String {
        let arcs: Vec<String> = self.store.arcs(id).iter().map(|&a| self.g.arc_name(a)).collect();
        let l = self.store.label(id);
        let forbidden: Vec<String> = l.forbidden.iter().map(|&a| self.g.arc_name(a as usize)).collect();
        format!("({}) {} {{{}}}", arcs.join(" "), l.length, forbidden.join(" "))
    }

    fn results(&self, complete: bool) -> Vec<NodeResult> {
        self.inked
            .iter()
            .map(|slot| match slot {
                Some(id) => NodeResult::Reached {
                    arcs: self.store.arcs(*id),
                    length: self.store.label(*id).length,
                },
                None if complete => NodeResult::Unreachable,
                None => NodeResult::Undecided,
            })
            .collect()
    }

    fn fail(&mut self, limit: LimitKind) -> CdError {
        let partial = Solution {
            results: self.results(false),
            stats: self.stats,
            trace: std::mem::take(&mut self.trace),
        };
        CdError::Limit {
            limit,
            partial: Box::new(partial),
        }
    }

    fn finish(mut self) -> Solution {
        // An early stop at a target leaves the other nodes undecided.
        let complete = self.opts.target.map_or(true, |t| {
            self.inked[t].is_none() || self.black == self.g.node_count()
        }) || self.heap.is_empty();
        Solution {
            results: self.results(complete),
            stats: self.stats,
            trace: std::mem::take(&mut self.trace),
        }
    }
}

/// The partial path formed by an arc sequence from the source.
pub fn partial_path(arcs: &[ArcId], g: &RivalGraph, state: PathState) -> PartialPath {
    let mut forbidden = BTreeSet::new();
    let mut length = 0;
    for &a in arcs {
        length += g.arc(a).length;
        forbidden.extend(g.arc(a).rivals.iter().copied());
    }
    PartialPath {
        arcs: arcs.to_vec(),
        length,
        forbidden,
        state,
    }
}

/// Node names `v1`..`v6`, arcs `e1`..`e11`: a graph on which the unconstrained
/// shortest path to `v3` is inadmissible and the shortest admissible paths do
/// not form a tree. Source `v1`.
pub fn walkthrough_graph() -> RivalGraph {
    let names = (1..=6).map(|i| format!("v{i}")).collect();
    let mut g = RivalGraph::with_names(names, 0);
    let arcs = [
        (1, 2, 5),
        (2, 3, 1),
        (1, 4, 1),
        (1, 5, 0),
        (6, 3, 1),
        (5, 2, 1),
        (2, 6, 3),
        (3, 6, 2),
        (4, 5, 0),
        (5, 4, 1),
        (5, 6, 2),
    ];
    for (i, (t, h, l)) in arcs.into_iter().enumerate() {
        g.add_named_arc(&format!("e{}", i + 1), t - 1, h - 1, l);
    }
    // e4 rivals e6; e11 rivals e1 and e5 (listed one way only).
    g.add_rival(3, 5);
    g.add_rival(10, 0);
    g.add_rival(10, 4);
    g
}

/// The grid `G_n`: integer points with coordinates in `[-n, n]`, arcs to the
/// southern and western neighbors, each arc's rival its mirror image in the
/// line `x + y = 0`. Source `(n, n)`. Returns the graph and a node index
/// function.
pub fn reflection_grid(n: i64) -> (RivalGraph, impl Fn(i64, i64) -> usize) {
    let side = 2 * n + 1;
    let index = move |x: i64, y: i64| ((x + n) * side + (y + n)) as usize;
    let mut names = Vec::with_capacity((side * side) as usize);
    for x in -n..=n {
        for y in -n..=n {
            names.push(format!("({x},{y})"));
        }
    }
    let mut g = RivalGraph::with_names(names, index(n, n));
    let mut arc_of = std::collections::HashMap::new();
    for x in -n..=n {
        for y in -n..=n {
            if y > -n {
                arc_of.insert(((x, y), (x, y - 1)), g.add_arc(index(x, y), index(x, y - 1), 1));
            }
            if x > -n {
                arc_of.insert(((x, y), (x - 1, y)), g.add_arc(index(x, y), index(x - 1, y), 1));
            }
        }
    }
    // (x, y) -> (-y, -x); the mirror of a south arc is a west arc, oriented
    // the same way as in the grid.
    let mirror = |(x, y): (i64, i64)| (-y, -x);
    let pairs: Vec<_> = arc_of.iter().map(|(&(a, b), &id)| (a, b, id)).collect();
    for (a, b, id) in pairs {
        let (ma, mb) = (mirror(a), mirror(b));
        let twin = arc_of.get(&(ma, mb)).or_else(|| arc_of.get(&(mb, ma)));
        if let Some(&t) = twin {
            if t != id {
                g.add_rival(id, t);
            }
        }
    }
    (g, index)
}

#[cfg(test)]
mod tests;
