//! Comparison schemes: dedicated 1+1 protection and greedy shared path
//! protection without regard to branch points.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, LinkId, NodeId, NodePath, Walk};
use crate::plan::{AllocationPlan, Demand, PlanEntry, PlanError, SurvivabilityMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("no disjoint pair of paths between {0} and {1}")]
    NoDisjointPair(String, String),
    #[error("demand {0}: a link on its routes has no spare capacity")]
    Capacity(u32),
    #[error("demand {demand}: entry rejected by the plan: {source}")]
    Rejected { demand: u32, source: PlanError },
}

/// A working path and a protection path disjoint from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointPair {
    pub working: NodePath,
    pub protection: NodePath,
    pub mode: SurvivabilityMode,
}

/// Shortest working path, then the shortest protection disjoint from it.
///
/// Every shortest working path is tried, so the protection is as short as
/// any shortest working path allows. Ties go to the first working path in
/// lexicographic order and, for it, the lexicographically smallest
/// protection.
pub fn disjoint_pair(g: &Graph, u: NodeId, v: NodeId, mode: SurvivabilityMode) -> Result<DisjointPair, BaselineError> {
    let mut best: Option<DisjointPair> = None;
    for working in g.all_shortest_paths(u, v, |_| true) {
        let links = working.links(g);
        let interior = working.interior();
        let usable = |l: LinkId| {
            if links.contains(&l) {
                return false;
            }
            let link = g.link(l);
            mode == SurvivabilityMode::Link || !(interior.contains(&link.a) || interior.contains(&link.b))
        };
        let Some(protection) = g.shortest_path(u, v, usable) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| protection.len() < b.protection.len()) {
            best = Some(DisjointPair {
                working,
                protection,
                mode,
            });
        }
    }
    best.ok_or_else(|| BaselineError::NoDisjointPair(g.name(u).to_string(), g.name(v).to_string()))
}

/// Disjoint pairs per terminal pair, computed once.
struct PairCache<'g> {
    g: &'g Graph,
    mode: SurvivabilityMode,
    pairs: HashMap<(NodeId, NodeId), DisjointPair>,
}

impl<'g> PairCache<'g> {
    fn get(&mut self, d: &Demand) -> Result<&DisjointPair, BaselineError> {
        if !self.pairs.contains_key(&(d.u, d.v)) {
            let p = disjoint_pair(self.g, d.u, d.v, self.mode)?;
            self.pairs.insert((d.u, d.v), p);
        }
        Ok(&self.pairs[&(d.u, d.v)])
    }
}

fn fresh_walk(g: &Graph, plan: &AllocationPlan, path: &NodePath, demand: u32) -> Result<Walk, BaselineError> {
    let edges = path
        .links(g)
        .into_iter()
        .map(|l| plan.fresh_edge(l).ok_or(BaselineError::Capacity(demand)))
        .collect::<Result<Vec<EdgeId>, _>>()?;
    Ok(Walk::new(g, path.nodes().to_vec(), edges).expect("edges follow the path"))
}

fn insert(plan: &mut AllocationPlan, entry: PlanEntry) -> Result<(), BaselineError> {
    let demand = entry.demand.id;
    plan.add_entry_allowing_branch_points(entry)
        .map_err(|source| BaselineError::Rejected { demand, source })
}

/// Dedicated protection: every demand gets its disjoint pair on fresh edges.
pub fn route_1plus1(graph: Arc<Graph>, mode: SurvivabilityMode, demands: &[Demand]) -> Result<AllocationPlan, BaselineError> {
    let g = graph.clone();
    let mut plan = AllocationPlan::new(graph, mode);
    let mut cache = PairCache {
        g: &g,
        mode,
        pairs: HashMap::new(),
    };
    for d in demands {
        let pair = cache.get(d)?.clone();
        let working = fresh_walk(&g, &plan, &pair.working, d.id)?;
        let protection = fresh_walk(&g, &plan, &pair.protection, d.id)?;
        insert(&mut plan, PlanEntry { demand: *d, working, protection })?;
    }
    Ok(plan)
}

/// Shared path protection: each copy of a terminal pair uses the pair's
/// fixed routes; each protection hop reuses the lowest-ordinal existing
/// protection edge whose users all have workings disjoint from this one,
/// else a fresh edge. Branch points are not avoided.
pub fn route_shared_path(graph: Arc<Graph>, mode: SurvivabilityMode, demands: &[Demand]) -> Result<AllocationPlan, BaselineError> {
    let g = graph.clone();
    let mut plan = AllocationPlan::new(graph, mode);
    let mut cache = PairCache {
        g: &g,
        mode,
        pairs: HashMap::new(),
    };
    let disj = mode.disjointness();
    for d in demands {
        let pair = cache.get(d)?.clone();
        let working = fresh_walk(&g, &plan, &pair.working, d.id)?;
        let mut edges = Vec::new();
        for l in pair.protection.links(&g) {
            let shared = plan.protection_edges_on(l).into_iter().find(|&e| {
                plan.protection_users(e)
                    .iter()
                    .all(|&j| plan.entries()[j].working.disjoint(&working, disj))
            });
            let e = match shared {
                Some(e) => e,
                None => plan.fresh_edge(l).ok_or(BaselineError::Capacity(d.id))?,
            };
            edges.push(e);
        }
        let protection = Walk::new(&g, pair.protection.nodes().to_vec(), edges).expect("edges follow the path");
        insert(&mut plan, PlanEntry { demand: *d, working, protection })?;
    }
    Ok(plan)
}
