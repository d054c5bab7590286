//! Online PXT routing.
//!
//! Demands are routed one at a time without disturbing earlier ones. The
//! working path is a shortest path over links with spare capacity. The
//! protection path is the cheapest route in an auxiliary graph whose arcs are
//! either one new edge on an unused link or a *shortcut* over a whole piece of
//! an existing PXT; reusing PXT pieces only in their entirety is what keeps
//! the plan free of branch points. Shortcuts may cross each other in the
//! underlying graph, so arcs carry rival lists and the search is done with
//! [`crate::cdijkstra`].

mod auxgraph;
mod subtrail;

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::cdijkstra::{self, CdError, LimitKind, SearchLimits, SolveOptions};
use crate::graph::{EdgeId, Graph, LinkId, NodeId, NodePath, Walk};
use crate::plan::{AllocationPlan, Demand, PlanEntry, PlanError, SurvivabilityMode};

pub use auxgraph::{AuxArc, AuxArcKind, AuxGraph, NEW_EDGE_WEIGHT, SHORTCUT_WEIGHT};
pub use subtrail::{segments, Boundary, Subtrail};

/// DFS steps allowed when enumerating tied optimal routes.
const TIE_BREAK_BUDGET: u64 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("demand {0}: no working route with spare capacity")]
    NoWorkingPath(u32),
    #[error("demand {0}: no admissible protection route")]
    NoProtectionPath(u32),
    #[error("demand {demand}: search limit exceeded ({limit})")]
    SearchLimit { demand: u32, limit: LimitKind },
    #[error("demand {demand}: routed entry rejected by the plan: {source}")]
    Rejected { demand: u32, source: PlanError },
}

#[derive(Clone, Debug, Default)]
pub struct RouterConfig {
    pub limits: SearchLimits,
    /// Record a per-demand decision trace.
    pub verbose: bool,
}

/// Edges a new protection route must avoid.
#[derive(Clone, Debug, Default)]
pub struct Prohibited {
    pub nodes: HashSet<NodeId>,
    pub links: HashSet<LinkId>,
    pub edges: HashSet<EdgeId>,
}

impl Prohibited {
    pub fn edge(&self, g: &Graph, e: EdgeId) -> bool {
        let l = g.link(e.link);
        self.edges.contains(&e)
            || self.links.contains(&e.link)
            || self.nodes.contains(&l.a)
            || self.nodes.contains(&l.b)
    }

    pub fn link(&self, g: &Graph, link: LinkId) -> bool {
        let l = g.link(link);
        self.links.contains(&link) || self.nodes.contains(&l.a) || self.nodes.contains(&l.b)
    }
}

/// A chosen protection route before it is committed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtectionChoice {
    pub protection: Walk,
    pub new_edges: usize,
    pub shortcuts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteOutcome {
    pub working: Walk,
    pub protection: Walk,
    pub new_edges: usize,
    pub shortcuts: usize,
}

pub struct Router {
    plan: AllocationPlan,
    config: RouterConfig,
    trace: Vec<String>,
}

impl Router {
    pub fn new(graph: Arc<Graph>, mode: SurvivabilityMode, config: RouterConfig) -> Self {
        Self::with_plan(AllocationPlan::new(graph, mode), config)
    }

    /// Continues from an existing plan, which must be free of branch points.
    pub fn with_plan(plan: AllocationPlan, config: RouterConfig) -> Self {
        Self {
            plan,
            config,
            trace: Vec::new(),
        }
    }

    pub fn plan(&self) -> &AllocationPlan {
        &self.plan
    }

    pub fn into_plan(self) -> AllocationPlan {
        self.plan
    }

    pub fn graph(&self) -> &Graph {
        self.plan.graph()
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    /// Shortest path over links with a free edge, on fresh edges.
    ///
    /// Among shortest paths, the lexicographically first one that still
    /// leaves some route for a protection path is taken; a shortest path can
    /// otherwise trap a terminal (every way out of it runs through the
    /// working path).
    pub fn find_working(&self, d: &Demand) -> Result<Walk, RouteError> {
        let g = self.graph();
        let free = |l: LinkId| self.plan.has_free_capacity(l);
        let candidates = g.all_shortest_paths(d.u, d.v, free);
        let path = candidates
            .iter()
            .find(|p| self.leaves_protection_route(d, p))
            .or(candidates.first())
            .ok_or(RouteError::NoWorkingPath(d.id))?;
        let edges = path
            .links(g)
            .into_iter()
            .map(|l| self.plan.fresh_edge(l).expect("link has free capacity"))
            .collect();
        Ok(Walk::new(g, path.nodes().to_vec(), edges).expect("fresh edges on a path"))
    }

    /// Whether u and v stay connected once the working path's links (and,
    /// in node mode, its interior nodes) are removed, counting only links
    /// that have spare capacity or carry protection.
    fn leaves_protection_route(&self, d: &Demand, p: &NodePath) -> bool {
        let g = self.graph();
        let links = p.links(g);
        let interior = p.interior();
        let node_mode = self.plan.mode() == SurvivabilityMode::Node;
        let usable = |l: LinkId| {
            let link = g.link(l);
            !links.contains(&l)
                && !(node_mode && (interior.contains(&link.a) || interior.contains(&link.b)))
                && (self.plan.has_free_capacity(l) || !self.plan.protection_edges_on(l).is_empty())
        };
        g.bfs_distances(d.u, usable)[d.v.index()].is_some()
    }

    /// PXT pieces between consecutive boundaries that are paths.
    pub fn collect_subtrails(&self, d: &Demand) -> Vec<Subtrail> {
        let pxts = self
            .plan
            .pxts()
            .expect("router plans have no branch points");
        segments(&pxts, d)
            .into_iter()
            .filter(|s| s.walk.is_path())
            .collect()
    }

    /// Nodes interior to the working path (node mode), links of the working
    /// path, and protection edges of demands whose workings meet it.
    pub fn prohibited(&self, w: &Walk) -> Prohibited {
        let mode = self.plan.mode();
        let mut p = Prohibited {
            links: w.links().collect(),
            ..Prohibited::default()
        };
        if mode == SurvivabilityMode::Node {
            p.nodes = w.interior().iter().copied().collect();
        }
        let disj = mode.disjointness();
        for entry in self.plan.entries() {
            if !entry.working.disjoint(w, disj) {
                p.edges.extend(entry.protection.edges().iter().copied());
            }
        }
        p
    }

    pub fn build_aux(&self, d: &Demand, w: &Walk, subtrails: Vec<Subtrail>) -> AuxGraph {
        let g = self.graph();
        let prohibited = self.prohibited(w);
        let usable: Vec<Subtrail> = subtrails
            .into_iter()
            .filter(|s| !s.walk.edges().iter().any(|&e| prohibited.edge(g, e)))
            .collect();
        let unused: Vec<LinkId> = g
            .links()
            .map(|(id, _)| id)
            .filter(|&l| self.plan.has_free_capacity(l) && !prohibited.link(g, l))
            .collect();
        AuxGraph::new(g, d.u, d.v, &unused, usable)
    }

    /// The cheapest protection route for `d` given its working path, without
    /// changing the plan.
    pub fn choose_protection(&self, d: &Demand, w: &Walk) -> Result<(ProtectionChoice, AuxGraph), RouteError> {
        let g = self.graph();
        let aux = self.build_aux(d, w, self.collect_subtrails(d));
        let rg = aux.to_rival_graph(g);
        let opts = SolveOptions {
            limits: self.config.limits,
            target: Some(d.v.index()),
            ..SolveOptions::default()
        };
        let sol = match cdijkstra::solve_with(&rg, &opts) {
            Ok(sol) => sol,
            Err(CdError::Limit { limit, .. }) => {
                return Err(RouteError::SearchLimit { demand: d.id, limit })
            }
            Err(e) => unreachable!("auxiliary graph is well formed: {e}"),
        };
        let Some(best) = sol.path(d.v.index()) else {
            return Err(RouteError::NoProtectionPath(d.id));
        };
        let cost = aux.cost(best);

        // Among equally cheap routes take the smallest expanded node
        // sequence, then edge sequence.
        let fresh = |l: LinkId| self.plan.fresh_edge(l).expect("unused link has capacity");
        let key = |path: &[usize]| expand(&aux, path, fresh);
        let chosen = match aux.optimal_paths(g.node_count(), cost, TIE_BREAK_BUDGET) {
            Some(paths) if !paths.is_empty() => paths
                .into_iter()
                .map(|p| {
                    let k = key(&p);
                    (k, p)
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .map(|(_, p)| p)
                .unwrap(),
            _ => best.to_vec(),
        };
        let (nodes, edges) = key(&chosen);
        let protection = Walk::new(g, nodes, edges).expect("expansion follows links");
        let shortcuts = chosen.iter().filter(|&&a| aux.arcs[a].is_shortcut()).count();
        let choice = ProtectionChoice {
            protection,
            new_edges: chosen.len() - shortcuts,
            shortcuts,
        };
        Ok((choice, aux))
    }

    /// Routes one demand and adds it to the plan.
    pub fn route_demand(&mut self, d: &Demand) -> Result<RouteOutcome, RouteError> {
        let working = self.find_working(d)?;
        let (choice, aux) = self.choose_protection(d, &working)?;
        if self.config.verbose {
            let g = self.graph();
            self.trace.push(format!(
                "demand {} {} {}\n  working {}\n  subtrails {}\n  aux unused {} shortcut {} rival-pairs {}\n  protection {} new {} shortcuts {}",
                d.id,
                g.name(d.u),
                g.name(d.v),
                working.to_text(g),
                aux.subtrails.len(),
                aux.unused_count(),
                aux.shortcut_count(),
                aux.rival_pairs(),
                choice.protection.to_text(g),
                choice.new_edges,
                choice.shortcuts,
            ));
        }
        let entry = PlanEntry {
            demand: *d,
            working: working.clone(),
            protection: choice.protection.clone(),
        };
        self.plan
            .add_entry(entry)
            .map_err(|source| RouteError::Rejected { demand: d.id, source })?;
        Ok(RouteOutcome {
            working,
            protection: choice.protection,
            new_edges: choice.new_edges,
            shortcuts: choice.shortcuts,
        })
    }
}

fn expand(aux: &AuxGraph, path: &[usize], fresh: impl Fn(LinkId) -> EdgeId + Copy) -> (Vec<NodeId>, Vec<EdgeId>) {
    let mut nodes = vec![aux.source];
    let mut edges = Vec::new();
    for &a in path {
        nodes.extend_from_slice(&aux.arcs[a].expansion[1..]);
        edges.extend(aux.expand_edges(a, fresh));
    }
    (nodes, edges)
}

/// Routes all demands in order with a fresh router.
pub fn route_all(
    graph: Arc<Graph>,
    mode: SurvivabilityMode,
    demands: &[Demand],
    config: RouterConfig,
) -> Result<AllocationPlan, RouteError> {
    let mut router = Router::new(graph, mode, config);
    for d in demands {
        router.route_demand(d)?;
    }
    Ok(router.into_plan())
}

#[cfg(test)]
mod tests;
