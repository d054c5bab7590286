//! The router against exhaustive search on small graphs.

use std::sync::Arc;

use proptest::prelude::*;
use pxt_core::graph::{Graph, GraphBuilder, NodeId, Walk};
use pxt_core::plan::{Demand, PlanEntry, SurvivabilityMode};
use pxt_core::router::{RouteError, Router, RouterConfig};
use pxt_core::traffic::SplitMix64;

/// A connected random graph on `n` nodes: a random spanning tree plus extra
/// links.
fn random_graph(rng: &mut SplitMix64, n: usize, extra: usize) -> Graph {
    let name = |i: usize| format!("n{i}");
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b = b.node(&name(i));
    }
    let mut have = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = rng.below(i as u64) as usize;
        have.insert((j, i));
    }
    for _ in 0..extra {
        let a = rng.below(n as u64) as usize;
        let c = rng.below(n as u64) as usize;
        if a != c {
            have.insert((a.min(c), a.max(c)));
        }
    }
    for (a, c) in have {
        b = b.link(&name(a), &name(c));
    }
    b.build().unwrap()
}

fn simple_paths(g: &Graph, u: NodeId, v: NodeId) -> Vec<Vec<NodeId>> {
    fn go(g: &Graph, at: NodeId, v: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if at == v {
            out.push(path.clone());
            return;
        }
        for &(next, _) in g.neighbors(at) {
            if !path.contains(&next) {
                path.push(next);
                go(g, next, v, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, u, v, &mut vec![u], &mut out);
    out
}

/// Fewest new edges over every protection route the plan would accept:
/// each hop either reuses an existing protection edge on the link or takes
/// a fresh edge.
fn cheapest_protection(router: &Router, d: &Demand, working: &Walk) -> Option<usize> {
    let plan = router.plan();
    let g = plan.graph();
    let mut best: Option<usize> = None;
    for nodes in simple_paths(g, d.u, d.v) {
        let links: Vec<_> = nodes.windows(2).map(|w| g.link_between(w[0], w[1]).unwrap()).collect();
        let options: Vec<Vec<(pxt_core::graph::EdgeId, bool)>> = links
            .iter()
            .map(|&l| {
                let mut o: Vec<_> = plan.protection_edges_on(l).into_iter().map(|e| (e, false)).collect();
                o.extend(plan.fresh_edge(l).map(|e| (e, true)));
                o
            })
            .collect();
        let mut choice = vec![0usize; links.len()];
        'combos: loop {
            let edges: Vec<_> = choice.iter().zip(&options).map(|(&i, o)| o[i].0).collect();
            let fresh = choice.iter().zip(&options).filter(|(&i, o)| o[i].1).count();
            if best.is_none_or(|b| fresh < b) {
                let protection = Walk::new(g, nodes.clone(), edges).unwrap();
                let entry = PlanEntry {
                    demand: *d,
                    working: working.clone(),
                    protection,
                };
                if plan.check_entry(&entry).is_empty() {
                    best = Some(fresh);
                }
            }
            for i in 0..choice.len() {
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    continue 'combos;
                }
                choice[i] = 0;
            }
            break;
        }
    }
    best
}

/// Returns how many demands were checked and how many of those reused at
/// least one existing protection edge.
fn check_against_oracle(seed: u64, mode: SurvivabilityMode) -> (usize, usize) {
    let (mut checked, mut reused) = (0, 0);
    let mut rng = SplitMix64::new(seed);
    let n = 4 + rng.below(3) as usize;
    let extra = 2 + rng.below(6) as usize;
    let g = Arc::new(random_graph(&mut rng, n, extra));
    let mut router = Router::new(g.clone(), mode, RouterConfig::default());
    let demands = 3 + rng.below(6);
    for id in 0..demands as u32 {
        let a = rng.below(n as u64) as u32;
        let b = rng.below(n as u64 - 1) as u32;
        let b = if b >= a { b + 1 } else { b };
        let d = Demand::new(id, NodeId(a), NodeId(b)).unwrap();
        let Ok(working) = router.find_working(&d) else {
            continue;
        };
        let oracle = cheapest_protection(&router, &d, &working);
        match router.choose_protection(&d, &working) {
            Ok((choice, _)) => {
                assert_eq!(Some(choice.new_edges), oracle, "seed {seed} demand {id}: new edges");
                let entry = PlanEntry {
                    demand: d,
                    working: working.clone(),
                    protection: choice.protection.clone(),
                };
                assert!(router.plan().check_entry(&entry).is_empty(), "seed {seed} demand {id}");
                checked += 1;
                if choice.new_edges < choice.protection.len() {
                    reused += 1;
                }
            }
            Err(RouteError::NoProtectionPath(_)) => {
                assert_eq!(oracle, None, "seed {seed} demand {id}: router found no route");
                continue;
            }
            Err(e) => panic!("seed {seed}: {e}"),
        }
        router.route_demand(&d).unwrap();
        assert!(router.plan().validate().is_empty());
        assert!(router.plan().branch_points().is_empty());
    }
    (checked, reused)
}

fn check_many(seeds: std::ops::Range<u64>, mode: SurvivabilityMode) {
    let (mut checked, mut reused) = (0, 0);
    for seed in seeds {
        let (c, r) = check_against_oracle(seed, mode);
        checked += c;
        reused += r;
    }
    assert!(checked >= 300 && reused >= 50, "too few interesting demands: {checked} checked, {reused} reused");
}

#[test]
fn protection_cost_is_optimal_in_node_mode() {
    check_many(0..150, SurvivabilityMode::Node);
}

#[test]
fn protection_cost_is_optimal_in_link_mode() {
    check_many(1000..1150, SurvivabilityMode::Link);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_prefix_is_valid_and_branch_free(seed in any::<u64>(), link in any::<bool>()) {
        let mode = if link { SurvivabilityMode::Link } else { SurvivabilityMode::Node };
        let mut rng = SplitMix64::new(seed);
        let n = 5 + rng.below(4) as usize;
        let extra = 4 + rng.below(8) as usize;
        let g = Arc::new(random_graph(&mut rng, n, extra));
        let mut router = Router::new(g, mode, RouterConfig::default());
        for id in 0..12u32 {
            let a = rng.below(n as u64) as u32;
            let b = (a + 1 + rng.below(n as u64 - 1) as u32) % n as u32;
            let d = Demand::new(id, NodeId(a), NodeId(b)).unwrap();
            if router.route_demand(&d).is_err() {
                continue;
            }
            prop_assert!(router.plan().validate().is_empty());
            prop_assert!(router.plan().branch_points().is_empty());
            prop_assert!(router.plan().extract_pxts().is_ok());
        }
    }
}
