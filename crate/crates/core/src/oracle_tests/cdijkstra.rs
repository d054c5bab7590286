
use std::time::{Duration, Instant};

use proptest::prelude::*;
use pxt_core::cdijkstra::{reflection_grid, solve, solve_with, walkthrough_graph, CdError, RivalGraph, SearchLimits, SolveOptions};
use pxt_core::traffic::SplitMix64;

use super::common::{brute_force_lengths, check_path, classic_dijkstra, random_plain_graph, random_rival_graph};

fn assert_matches_oracle(g: &RivalGraph, pruning: bool) {
    let opts = SolveOptions {
        pruning,
        ..SolveOptions::default()
    };
    let sol = solve_with(g, &opts).expect("small instance stays within limits");
    let expected = brute_force_lengths(g);
    for (n, want) in expected.iter().enumerate() {
        assert_eq!(sol.length(n), *want, "node {n} (pruning {pruning})");
        if let Some(path) = sol.path(n) {
            let len = check_path(g, path, n).unwrap_or_else(|e| panic!("node {n}: {e}"));
            assert_eq!(Some(len), *want);
        }
    }
}

#[test]
fn walkthrough_graph_matches_brute_force() {
    let g = walkthrough_graph();
    assert_matches_oracle(&g, true);
    assert_matches_oracle(&g, false);
}

#[test]
fn random_instances_match_brute_force() {
    let mut rng = SplitMix64::new(0x5eed);
    for _ in 0..300 {
        let g = random_rival_graph(&mut rng, 8, 20, 6);
        assert_matches_oracle(&g, true);
        assert_matches_oracle(&g, false);
    }
}

#[test]
fn degenerate_graphs_match_dijkstra() {
    let mut rng = SplitMix64::new(7);
    for _ in 0..100 {
        let g = random_plain_graph(&mut rng, 30, 80);
        let sol = solve(&g, SearchLimits::default()).unwrap();
        let want = classic_dijkstra(&g);
        for (n, w) in want.iter().enumerate() {
            assert_eq!(sol.length(n), *w, "node {n}");
        }
    }
}

#[test]
fn small_reflection_grids_match_brute_force() {
    for n in 1..=2 {
        let (g, _) = reflection_grid(n);
        assert_matches_oracle(&g, true);
    }
}

#[test]
fn large_reflection_grid_hits_a_limit_quickly() {
    let (g, _) = reflection_grid(25);
    let start = Instant::now();
    let res = solve(&g, SearchLimits::default());
    assert!(matches!(res, Err(CdError::Limit { .. })), "expected a limit error");
    assert!(start.elapsed() < Duration::from_secs(60));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reached_paths_are_admissible(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let g = random_rival_graph(&mut rng, 8, 20, 6);
        let sol = solve(&g, SearchLimits::default()).unwrap();
        prop_assert_eq!(sol.length(g.source), Some(0));
        for n in 0..g.node_count() {
            if let Some(p) = sol.path(n) {
                prop_assert!(g.is_admissible(p) || !g.is_symmetric());
                prop_assert_eq!(check_path(&g, p, n).map(Some), Ok(sol.length(n)));
            }
        }
    }

    #[test]
    fn pruning_changes_nothing_but_effort(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let g = random_rival_graph(&mut rng, 8, 20, 6);
        let on = solve_with(&g, &SolveOptions::default()).unwrap();
        let off = solve_with(&g, &SolveOptions { pruning: false, ..SolveOptions::default() }).unwrap();
        for n in 0..g.node_count() {
            prop_assert_eq!(on.length(n), off.length(n));
        }
        prop_assert!(on.stats.stored <= off.stats.stored);
    }
}
