//! Allocation plans.
//!
//! An [`AllocationPlan`] lists, per demand, a working path and a protection
//! path, and must satisfy four conditions:
//!
//! - **a**: each demand's working and protection paths are node-disjoint
//!   (link-disjoint in [`SurvivabilityMode::Link`]);
//! - **b**: an edge on some working path appears on no other path of any
//!   other demand;
//! - **c**: demands whose working paths are not disjoint have edge-disjoint
//!   protection paths;
//! - **d**: no branch points, i.e. a protection edge is consecutive with at
//!   most one other protection edge at each of its endnodes.
//!
//! Consecutive protection edges are *pre-cross-connected*. When condition d
//! holds the protection edges decompose into edge-disjoint trails, the PXTs,
//! which the plan maintains incrementally as entries are added.

mod format;
mod pxt;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Disjointness, EdgeId, Graph, LinkId, NodeId, Walk};

pub use format::{entry_line, PlanFormatError};
pub use pxt::{canonical_set, Pxt};
use pxt::PxtSet;

/// Which disjointness conditions a and c use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SurvivabilityMode {
    /// Survive any single link or node failure.
    #[default]
    Node,
    /// Survive any single link failure.
    Link,
}

impl SurvivabilityMode {
    pub fn disjointness(self) -> Disjointness {
        match self {
            SurvivabilityMode::Node => Disjointness::Node,
            SurvivabilityMode::Link => Disjointness::Link,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SurvivabilityMode::Node => "node",
            SurvivabilityMode::Link => "link",
        }
    }
}

impl std::str::FromStr for SurvivabilityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "node" => Ok(SurvivabilityMode::Node),
            "link" => Ok(SurvivabilityMode::Link),
            _ => Err(format!("unknown mode `{s}` (expected node or link)")),
        }
    }
}

/// An unordered pair of distinct terminals; stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Demand {
    pub id: u32,
    pub u: NodeId,
    pub v: NodeId,
}

impl Demand {
    pub fn new(id: u32, a: NodeId, b: NodeId) -> Option<Demand> {
        (a != b).then(|| Demand {
            id,
            u: a.min(b),
            v: a.max(b),
        })
    }

    pub fn terminals(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    pub fn is_terminal(&self, n: NodeId) -> bool {
        n == self.u || n == self.v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub demand: Demand,
    pub working: Walk,
    pub protection: Walk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Working or protection route is not a path between the terminals.
    Structure,
    A,
    B,
    C,
    D,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Structure => "structure",
            Condition::A => "a",
            Condition::B => "b",
            Condition::C => "c",
            Condition::D => "d",
        })
    }
}

/// One broken condition with the demands and elements that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub demands: Vec<u32>,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl Violation {
    fn new(condition: Condition, demands: Vec<u32>, nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Self {
        Self {
            condition,
            demands,
            nodes,
            edges,
        }
    }

    pub fn describe(&self, g: &Graph) -> String {
        let demands: Vec<String> = self.demands.iter().map(|d| d.to_string()).collect();
        let nodes: Vec<&str> = self.nodes.iter().map(|n| g.name(*n)).collect();
        let edges: Vec<String> = self.edges.iter().map(|e| g.edge_label(*e)).collect();
        format!(
            "condition {}: demands [{}] nodes [{}] edges [{}]",
            self.condition,
            demands.join(" "),
            nodes.join(" "),
            edges.join(" ")
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("entry for demand {demand} rejected: {violations:?}")]
    Rejected {
        demand: u32,
        violations: Vec<Violation>,
    },
    #[error("plan has branch points at {0:?}")]
    BranchPoints(Vec<NodeId>),
}

impl PlanError {
    /// The violations behind a rejection, if any.
    pub fn violations(&self) -> &[Violation] {
        match self {
            PlanError::Rejected { violations, .. } => violations,
            PlanError::BranchPoints(_) => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Checks {
    All,
    AllowBranchPoints,
    None,
}

/// Entries using one edge, by index into the plan's entry list.
#[derive(Clone, Debug, Default)]
struct EdgeUse {
    working: Vec<usize>,
    protection: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Bandwidth {
    pub working: usize,
    pub protection: usize,
    pub total: usize,
}

#[derive(Clone, Debug)]
pub struct AllocationPlan {
    graph: Arc<Graph>,
    mode: SurvivabilityMode,
    entries: Vec<PlanEntry>,
    edges: BTreeMap<EdgeId, EdgeUse>,
    ordinals: HashMap<LinkId, BTreeSet<u32>>,
    /// Symmetric pairing: (node, edge) -> partners at that node.
    crossconnects: BTreeMap<(NodeId, EdgeId), Vec<EdgeId>>,
    /// Maintained while the plan is free of branch points.
    pxts: Option<PxtSet>,
}

impl AllocationPlan {
    pub fn new(graph: Arc<Graph>, mode: SurvivabilityMode) -> Self {
        Self {
            graph,
            mode,
            entries: Vec::new(),
            edges: BTreeMap::new(),
            ordinals: HashMap::new(),
            crossconnects: BTreeMap::new(),
            pxts: Some(PxtSet::default()),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn mode(&self) -> SurvivabilityMode {
        self.mode
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an entry after checking conditions a-d against the current plan.
    pub fn add_entry(&mut self, entry: PlanEntry) -> Result<(), PlanError> {
        self.insert(entry, Checks::All)
    }

    /// Adds an entry checking conditions a-c only. Used by schemes that share
    /// protection bandwidth without regard to branch points.
    pub fn add_entry_allowing_branch_points(&mut self, entry: PlanEntry) -> Result<(), PlanError> {
        self.insert(entry, Checks::AllowBranchPoints)
    }

    /// Adds an entry without checking any condition, e.g. when loading a plan
    /// file that is to be validated afterwards.
    pub fn push_unchecked(&mut self, entry: PlanEntry) {
        self.insert(entry, Checks::None)
            .expect("unchecked insertion cannot fail");
    }

    fn insert(&mut self, entry: PlanEntry, checks: Checks) -> Result<(), PlanError> {
        if checks != Checks::None {
            let mut violations = self.check_entry(&entry);
            if checks == Checks::AllowBranchPoints {
                violations.retain(|v| v.condition != Condition::D);
            }
            if !violations.is_empty() {
                return Err(PlanError::Rejected {
                    demand: entry.demand.id,
                    violations,
                });
            }
        }
        self.commit(entry);
        Ok(())
    }

    /// Violations the entry would introduce if added to this plan.
    pub fn check_entry(&self, entry: &PlanEntry) -> Vec<Violation> {
        let mut out = Vec::new();
        let id = entry.demand.id;
        let d = entry.demand;
        for route in [&entry.working, &entry.protection] {
            if !route.connects(d.u, d.v) || !route.is_path() || route.is_empty() {
                out.push(Violation::new(
                    Condition::Structure,
                    vec![id],
                    route.nodes().to_vec(),
                    route.edges().to_vec(),
                ));
            }
        }
        if !entry
            .working
            .disjoint(&entry.protection, self.mode.disjointness())
        {
            out.push(Violation::new(
                Condition::A,
                vec![id],
                vec![d.u, d.v],
                Vec::new(),
            ));
        }

        // b: working edges are exclusive.
        for e in entry.working.edges() {
            if let Some(usage) = self.edges.get(e) {
                for &j in usage.working.iter().chain(&usage.protection) {
                    out.push(Violation::new(
                        Condition::B,
                        vec![id, self.entries[j].demand.id],
                        Vec::new(),
                        vec![*e],
                    ));
                }
            }
        }
        for e in entry.protection.edges() {
            if let Some(usage) = self.edges.get(e) {
                for &j in &usage.working {
                    out.push(Violation::new(
                        Condition::B,
                        vec![self.entries[j].demand.id, id],
                        Vec::new(),
                        vec![*e],
                    ));
                }
            }
        }

        // c: shared protection edges need disjoint workings.
        let mode = self.mode.disjointness();
        for e in entry.protection.edges() {
            if let Some(usage) = self.edges.get(e) {
                for &j in &usage.protection {
                    if !self.entries[j].working.disjoint(&entry.working, mode) {
                        out.push(Violation::new(
                            Condition::C,
                            vec![self.entries[j].demand.id, id],
                            Vec::new(),
                            vec![*e],
                        ));
                    }
                }
            }
        }

        // d: each new consecutive pair must not give an edge a second partner.
        for (x, e1, e2) in consecutive_pairs(&entry.protection) {
            for (a, b) in [(e1, e2), (e2, e1)] {
                if let Some(partners) = self.crossconnects.get(&(x, a)) {
                    for &p in partners {
                        if p != b {
                            out.push(Violation::new(
                                Condition::D,
                                self.demands_with_pair(x, a, p, id),
                                vec![x],
                                vec![a, p, b],
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    fn demands_with_pair(&self, x: NodeId, a: EdgeId, b: EdgeId, extra: u32) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .edges
            .get(&a)
            .map(|u| {
                u.protection
                    .iter()
                    .filter(|&&j| {
                        consecutive_pairs(&self.entries[j].protection).any(|(y, p, q)| {
                            y == x && ((p == a && q == b) || (p == b && q == a))
                        })
                    })
                    .map(|&j| self.entries[j].demand.id)
                    .collect()
            })
            .unwrap_or_default();
        ids.push(extra);
        ids
    }

    fn commit(&mut self, entry: PlanEntry) {
        let idx = self.entries.len();
        for e in entry.working.edges() {
            self.edges.entry(*e).or_default().working.push(idx);
            self.ordinals.entry(e.link).or_default().insert(e.ordinal);
        }
        for e in entry.protection.edges() {
            self.edges.entry(*e).or_default().protection.push(idx);
            self.ordinals.entry(e.link).or_default().insert(e.ordinal);
        }
        let mut new_pairs = Vec::new();
        let mut branch = false;
        for (x, e1, e2) in consecutive_pairs(&entry.protection) {
            let fresh = self.link_pair(x, e1, e2);
            self.link_pair(x, e2, e1);
            if fresh {
                new_pairs.push((x, e1, e2));
            }
            branch |= self.crossconnects[&(x, e1)].len() > 1
                || self.crossconnects[&(x, e2)].len() > 1;
        }
        if branch {
            self.pxts = None;
        } else if let Some(set) = &mut self.pxts {
            if !set.absorb(&entry.protection, &new_pairs) {
                self.pxts = None;
            }
        }
        self.entries.push(entry);
    }

    /// Records `b` as a partner of `a` at `x`; returns whether it was new.
    fn link_pair(&mut self, x: NodeId, a: EdgeId, b: EdgeId) -> bool {
        let partners = self.crossconnects.entry((x, a)).or_default();
        if partners.contains(&b) {
            false
        } else {
            partners.push(b);
            partners.sort();
            true
        }
    }

    /// Smallest edge ordinal on `link` not yet used, if capacity allows.
    pub fn fresh_edge(&self, link: LinkId) -> Option<EdgeId> {
        let used = self.ordinals.get(&link);
        let mut k = 0u32;
        if let Some(used) = used {
            for &o in used {
                if o != k {
                    break;
                }
                k += 1;
            }
        }
        self.graph
            .link(link)
            .capacity
            .admits(k)
            .then(|| EdgeId::new(link, k))
    }

    pub fn has_free_capacity(&self, link: LinkId) -> bool {
        self.fresh_edge(link).is_some()
    }

    /// Edges materialized on a link so far.
    pub fn materialized(&self, link: LinkId) -> usize {
        self.ordinals.get(&link).map_or(0, |s| s.len())
    }

    pub fn is_protection_edge(&self, e: EdgeId) -> bool {
        self.edges.get(&e).is_some_and(|u| !u.protection.is_empty())
    }

    pub fn is_working_edge(&self, e: EdgeId) -> bool {
        self.edges.get(&e).is_some_and(|u| !u.working.is_empty())
    }

    /// Indices of entries whose protection path uses `e`.
    pub fn protection_users(&self, e: EdgeId) -> &[usize] {
        self.edges.get(&e).map_or(&[], |u| &u.protection)
    }

    /// Indices of entries whose working path uses `e`.
    pub fn working_users(&self, e: EdgeId) -> &[usize] {
        self.edges.get(&e).map_or(&[], |u| &u.working)
    }

    /// Protection edges on a link, in ordinal order.
    pub fn protection_edges_on(&self, link: LinkId) -> Vec<EdgeId> {
        self.edges
            .range(EdgeId::new(link, 0)..=EdgeId::new(link, u32::MAX))
            .filter(|(_, u)| !u.protection.is_empty())
            .map(|(e, _)| *e)
            .collect()
    }

    /// Edges pre-cross-connected to `e` at node `x`.
    pub fn partners(&self, x: NodeId, e: EdgeId) -> &[EdgeId] {
        self.crossconnects.get(&(x, e)).map_or(&[], |v| v)
    }

    /// All cross-connections as `(node, e1, e2)` with `e1 < e2`.
    pub fn crossconnects(&self) -> Vec<(NodeId, EdgeId, EdgeId)> {
        self.crossconnects
            .iter()
            .flat_map(|(&(x, a), ps)| {
                ps.iter()
                    .filter(move |&&b| a < b)
                    .map(move |&b| (x, a, b))
            })
            .collect()
    }

    /// Nodes where some protection edge has two different partners.
    pub fn branch_points(&self) -> BTreeSet<NodeId> {
        self.crossconnects
            .iter()
            .filter(|(_, ps)| ps.len() > 1)
            .map(|(&(x, _), _)| x)
            .collect()
    }

    pub fn bandwidth(&self) -> Bandwidth {
        let working = self.edges.values().filter(|u| !u.working.is_empty()).count();
        let protection = self
            .edges
            .values()
            .filter(|u| !u.protection.is_empty())
            .count();
        Bandwidth {
            working,
            protection,
            total: working + protection,
        }
    }

    /// PXTs as maintained incrementally while entries were added.
    pub fn pxts(&self) -> Result<Vec<Pxt>, PlanError> {
        match &self.pxts {
            Some(set) => Ok(set.trails()),
            None => Err(PlanError::BranchPoints(
                self.branch_points().into_iter().collect(),
            )),
        }
    }

    /// Recomputes the PXTs from the cross-connections alone.
    ///
    /// Fails if the plan has branch points, since the pairing is then not a
    /// decomposition into trails.
    pub fn extract_pxts(&self) -> Result<Vec<Pxt>, PlanError> {
        let bp = self.branch_points();
        if !bp.is_empty() {
            return Err(PlanError::BranchPoints(bp.into_iter().collect()));
        }
        let protection: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|(_, u)| !u.protection.is_empty())
            .map(|(e, _)| *e)
            .collect();
        Ok(pxt::extract(&self.graph, &protection, |x, e| {
            self.crossconnects.get(&(x, e)).and_then(|p| p.first().copied())
        }))
    }

    /// Checks conditions a-d over the whole plan from scratch.
    pub fn validate(&self) -> Vec<Violation> {
        validate_entries(&self.graph, self.mode, &self.entries)
    }
}

/// `(node, edge before, edge after)` for each interior node of a path.
pub(crate) fn consecutive_pairs(w: &Walk) -> impl Iterator<Item = (NodeId, EdgeId, EdgeId)> + '_ {
    w.edges()
        .windows(2)
        .zip(&w.nodes()[1..])
        .map(|(pair, &x)| (x, pair[0], pair[1]))
}

/// Independent full check of conditions a-d. Builds its own indices and does
/// not look at any incrementally maintained state.
pub fn validate_entries(g: &Graph, mode: SurvivabilityMode, entries: &[PlanEntry]) -> Vec<Violation> {
    let disj = mode.disjointness();
    let mut out = Vec::new();
    let mut working_users: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    let mut protection_users: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();

    for (i, entry) in entries.iter().enumerate() {
        let d = entry.demand;
        for route in [&entry.working, &entry.protection] {
            let valid_walk = Walk::new(g, route.nodes().to_vec(), route.edges().to_vec()).is_ok();
            if !valid_walk || !route.connects(d.u, d.v) || !route.is_path() || route.is_empty() {
                out.push(Violation::new(
                    Condition::Structure,
                    vec![d.id],
                    route.nodes().to_vec(),
                    route.edges().to_vec(),
                ));
            }
        }
        if !entry.working.disjoint(&entry.protection, disj) {
            out.push(Violation::new(Condition::A, vec![d.id], vec![d.u, d.v], Vec::new()));
        }
        for e in entry.working.edges() {
            working_users.entry(*e).or_default().push(i);
        }
        for e in entry.protection.edges() {
            protection_users.entry(*e).or_default().push(i);
        }
    }

    // b
    for (e, ws) in &working_users {
        let mut users: Vec<usize> = ws.clone();
        users.extend(protection_users.get(e).into_iter().flatten().copied());
        users.sort();
        users.dedup();
        if users.len() > 1 {
            out.push(Violation::new(
                Condition::B,
                users.iter().map(|&j| entries[j].demand.id).collect(),
                Vec::new(),
                vec![*e],
            ));
        }
    }

    // c
    for (e, ps) in &protection_users {
        for (k, &i) in ps.iter().enumerate() {
            for &j in &ps[k + 1..] {
                if !entries[i].working.disjoint(&entries[j].working, disj) {
                    out.push(Violation::new(
                        Condition::C,
                        vec![entries[i].demand.id, entries[j].demand.id],
                        Vec::new(),
                        vec![*e],
                    ));
                }
            }
        }
    }

    // d
    let mut pairs: BTreeMap<(NodeId, EdgeId), BTreeMap<EdgeId, Vec<u32>>> = BTreeMap::new();
    for entry in entries {
        for (x, a, b) in consecutive_pairs(&entry.protection) {
            pairs
                .entry((x, a))
                .or_default()
                .entry(b)
                .or_default()
                .push(entry.demand.id);
            pairs
                .entry((x, b))
                .or_default()
                .entry(a)
                .or_default()
                .push(entry.demand.id);
        }
    }
    for ((x, a), partners) in &pairs {
        if partners.len() > 1 {
            let mut edges = vec![*a];
            edges.extend(partners.keys().copied());
            let mut demands: Vec<u32> = partners.values().flatten().copied().collect();
            demands.sort();
            demands.dedup();
            out.push(Violation::new(Condition::D, demands, vec![*x], edges));
        }
    }
    out
}
