use super::*;
use crate::graph::{Capacity, GraphBuilder};

/// Links AB, CD, CA, AE, EB, ED, DB.
fn five_nodes() -> Arc<Graph> {
    let mut b = GraphBuilder::new();
    for n in ["A", "B", "C", "D", "E"] {
        b = b.node(n);
    }
    for (u, v) in [("A", "B"), ("C", "D"), ("C", "A"), ("A", "E"), ("E", "B"), ("E", "D"), ("D", "B")] {
        b = b.link(u, v);
    }
    Arc::new(b.build().unwrap())
}

fn demand(g: &Graph, id: u32, u: &str, v: &str) -> Demand {
    Demand::new(id, g.node(u).unwrap(), g.node(v).unwrap()).unwrap()
}

fn names(g: &Graph, w: &Walk) -> Vec<String> {
    w.nodes().iter().map(|n| g.name(*n).to_string()).collect()
}

fn router(g: &Arc<Graph>) -> Router {
    Router::new(g.clone(), SurvivabilityMode::Node, RouterConfig::default())
}

#[test]
fn direct_link_working() {
    let g = five_nodes();
    let r = router(&g);
    let w = r.find_working(&demand(&g, 0, "A", "B")).unwrap();
    assert_eq!(names(&g, &w), ["A", "B"]);
}

#[test]
fn second_demand_reuses_the_pxt() {
    let g = five_nodes();
    let mut r = router(&g);
    let first = r.route_demand(&demand(&g, 0, "A", "B")).unwrap();
    assert_eq!(names(&g, &first.protection), ["A", "E", "B"]);
    assert_eq!(first.new_edges, 2);

    let d = demand(&g, 1, "C", "D");
    let subtrails = r.collect_subtrails(&d);
    assert_eq!(subtrails.len(), 1);
    assert!(matches!(subtrails[0].start, Boundary::TrailEnd(_)));
    assert_eq!(subtrails[0].walk.len(), 2);

    let second = r.route_demand(&d).unwrap();
    assert_eq!(second.new_edges, 2);
    assert_eq!(second.shortcuts, 1);
    assert_eq!(names(&g, &second.protection), ["C", "A", "E", "B", "D"]);
    let plan = r.plan();
    assert!(plan.validate().is_empty());
    assert_eq!(plan.bandwidth().protection, 4);
    let pxts = plan.pxts().unwrap();
    assert_eq!(pxts.len(), 1);
    assert_eq!(pxts[0].trail.len(), 4);
}

#[test]
fn subtrails_cut_at_terminals() {
    let g = five_nodes();
    let mut r = router(&g);
    r.route_demand(&demand(&g, 0, "A", "B")).unwrap();
    r.route_demand(&demand(&g, 1, "C", "D")).unwrap();
    // The PXT is C-A-E-B-D; a demand {C, B} cuts it at C and B.
    let subs = r.collect_subtrails(&demand(&g, 2, "B", "C"));
    let mut shapes: Vec<Vec<String>> = subs.iter().map(|s| names(&g, &s.walk)).collect();
    for s in &mut shapes {
        if s[0] > s[s.len() - 1] {
            s.reverse();
        }
    }
    shapes.sort();
    assert_eq!(shapes, vec![vec!["B", "D"], vec!["B", "E", "A", "C"]]);
}

#[test]
fn prohibited_edges() {
    let g = five_nodes();
    let mut r = router(&g);
    r.route_demand(&demand(&g, 0, "A", "B")).unwrap();
    let plan = r.plan();
    let e_ae = plan.entries()[0].protection.edges()[0];
    // A working path through A: A's edges are prohibited.
    let w = Walk::on_path(
        &g,
        &crate::graph::NodePath::new(vec![g.node("C").unwrap(), g.node("A").unwrap(), g.node("E").unwrap()]),
        &[0, 1],
    )
    .unwrap();
    let p = r.prohibited(&w);
    assert!(p.edge(&g, e_ae));
    // Working E-B-D passes through B, an end of demand 0's working A-B.
    let w = Walk::on_path(
        &g,
        &crate::graph::NodePath::new(vec![g.node("E").unwrap(), g.node("B").unwrap(), g.node("D").unwrap()]),
        &[1, 0],
    )
    .unwrap();
    let p = r.prohibited(&w);
    assert!(p.edges.contains(&e_ae));
    // Working C-D is node-disjoint from A-B: sharing allowed.
    let w = r.find_working(&demand(&g, 2, "C", "D")).unwrap();
    let p = r.prohibited(&w);
    assert!(!p.edge(&g, e_ae));
}

#[test]
fn empty_plan_aux_has_no_rivals() {
    let g = five_nodes();
    let r = router(&g);
    let d = demand(&g, 0, "A", "B");
    let w = r.find_working(&d).unwrap();
    let aux = r.build_aux(&d, &w, r.collect_subtrails(&d));
    assert_eq!(aux.shortcut_count(), 0);
    assert_eq!(aux.unused_count(), 2 * 6);
    assert_eq!(aux.rival_pairs(), 0);
}

/// Plus shape: X in the middle, N/S/E/W around it, and a ring around.
fn plus() -> Arc<Graph> {
    let mut b = GraphBuilder::new();
    for n in ["N", "S", "E", "W", "X", "P"] {
        b = b.node(n);
    }
    for (u, v) in [("N", "X"), ("X", "S"), ("E", "X"), ("X", "W"), ("N", "E"), ("E", "S"), ("S", "W"), ("W", "N"), ("P", "N")] {
        b = b.link(u, v);
    }
    Arc::new(b.build().unwrap())
}

fn sub(g: &Graph, path: &[&str], start_end: bool) -> Subtrail {
    let nodes: Vec<NodeId> = path.iter().map(|n| g.node(n).unwrap()).collect();
    let w = Walk::on_path(g, &crate::graph::NodePath::new(nodes.clone()), &vec![0; nodes.len() - 1]).unwrap();
    let b = |n| if start_end { Boundary::TrailEnd(n) } else { Boundary::Terminal(n) };
    Subtrail {
        start: b(w.first()),
        end: b(w.last()),
        walk: w,
        pxt: 0,
    }
}

#[test]
fn crossing_shortcuts_are_rivals() {
    let g = plus();
    let n = |s| g.node(s).unwrap();
    let ns = sub(&g, &["N", "X", "S"], true);
    let ew = sub(&g, &["E", "X", "W"], true);
    let aux = AuxGraph::new(&g, n("N"), n("S"), &[], vec![ns, ew]);
    assert_eq!(aux.arcs.len(), 4);
    // Each direction of one shortcut rivals both directions of the other.
    for a in 0..2 {
        for b in 2..4 {
            assert!(aux.are_rivals(a, b));
        }
    }
}

#[test]
fn unused_arc_into_subtrail_interior_is_rival() {
    let g = plus();
    let n = |s| g.node(s).unwrap();
    let ns = sub(&g, &["N", "X", "S"], true);
    let ex = g.link_between(n("E"), n("X")).unwrap();
    let pn = g.link_between(n("P"), n("N")).unwrap();
    let aux = AuxGraph::new(&g, n("P"), n("S"), &[ex, pn], vec![ns]);
    let shortcut: Vec<usize> = (0..aux.arcs.len()).filter(|&i| aux.arcs[i].is_shortcut()).collect();
    let ex_arcs: Vec<usize> = (0..aux.arcs.len())
        .filter(|&i| matches!(aux.arcs[i].kind, AuxArcKind::Unused { link } if link == ex))
        .collect();
    assert_eq!((shortcut.len(), ex_arcs.len()), (2, 2));
    let pn_arcs: Vec<usize> = (0..aux.arcs.len())
        .filter(|&i| matches!(aux.arcs[i].kind, AuxArcKind::Unused { link } if link == pn))
        .collect();
    for &a in &ex_arcs {
        for &s in &shortcut {
            assert!(aux.are_rivals(a, s), "E-X shares X, interior to N-X-S");
        }
    }
    for &a in &pn_arcs {
        for &s in &shortcut {
            assert!(!aux.are_rivals(a, s), "P-N meets N-X-S only at a common endpoint");
        }
    }
}

#[test]
fn terminals_on_one_pxt_cost_nothing() {
    let mut b = GraphBuilder::new();
    for n in ["M", "U", "V", "X", "Y"] {
        b = b.node(n);
    }
    for (u, v) in [("X", "Y"), ("X", "U"), ("U", "M"), ("M", "V"), ("V", "Y"), ("U", "V")] {
        b = b.link(u, v);
    }
    let g = Arc::new(b.build().unwrap());
    let walk = |names: &[&str]| {
        let nodes = names.iter().map(|n| g.node(n).unwrap()).collect();
        Walk::on_path(&g, &crate::graph::NodePath::new(nodes), &vec![0; names.len() - 1]).unwrap()
    };
    let mut plan = AllocationPlan::new(g.clone(), SurvivabilityMode::Node);
    plan.add_entry(PlanEntry {
        demand: demand(&g, 0, "X", "Y"),
        working: walk(&["X", "Y"]),
        protection: walk(&["X", "U", "M", "V", "Y"]),
    })
    .unwrap();
    let mut r = Router::with_plan(plan, RouterConfig::default());
    let out = r.route_demand(&demand(&g, 1, "U", "V")).unwrap();
    assert_eq!(names(&g, &out.working), ["U", "V"]);
    assert_eq!(names(&g, &out.protection), ["U", "M", "V"]);
    assert_eq!((out.new_edges, out.shortcuts), (0, 1));
    assert_eq!(r.plan().bandwidth().protection, 4);
    assert!(r.plan().validate().is_empty());
}

#[test]
fn saturated_link_forces_detour() {
    let g = Arc::new(
        GraphBuilder::new()
            .node("A")
            .node("B")
            .node("C")
            .node("D")
            .link_with_capacity("A", "B", Capacity::Finite(1))
            .link("A", "C")
            .link("C", "B")
            .link("A", "D")
            .link("D", "B")
            .build()
            .unwrap(),
    );
    let mut r = router(&g);
    let first = r.route_demand(&demand(&g, 0, "A", "B")).unwrap();
    assert_eq!(names(&g, &first.working), ["A", "B"]);
    let second = r.route_demand(&demand(&g, 1, "A", "B")).unwrap();
    assert_eq!(names(&g, &second.working), ["A", "C", "B"]);
    assert_eq!(names(&g, &second.protection), ["A", "D", "B"]);
    assert!(r.plan().validate().is_empty());
}

#[test]
fn verbose_trace() {
    let g = five_nodes();
    let mut r = Router::new(
        g.clone(),
        SurvivabilityMode::Node,
        RouterConfig {
            verbose: true,
            ..RouterConfig::default()
        },
    );
    r.route_demand(&demand(&g, 0, "A", "B")).unwrap();
    assert_eq!(
        r.trace(),
        ["demand 0 A B\n  working A @0 B\n  subtrails 0\n  aux unused 12 shortcut 0 rival-pairs 0\n  protection A @0 E @0 B new 2 shortcuts 0"]
    );
}

#[test]
fn working_path_avoids_trapping_a_terminal() {
    // Eight-node ring plus chord v0-v3. The first shortest path
    // v1-v0-v3-v4 would leave v1 no way out; v1-v2-v3-v4 does not.
    let mut b = GraphBuilder::new();
    let labels: Vec<String> = (0..8).map(|i| format!("v{i}")).collect();
    for n in &labels {
        b = b.node(n);
    }
    for i in 0..8 {
        b = b.link(&labels[i], &labels[(i + 1) % 8]);
    }
    let g = Arc::new(b.link("v0", "v3").build().unwrap());
    let mut r = router(&g);
    let out = r.route_demand(&demand(&g, 0, "v1", "v4")).unwrap();
    assert_eq!(names(&g, &out.working), ["v1", "v2", "v3", "v4"]);
    assert_eq!(out.protection.len(), 5);
}
