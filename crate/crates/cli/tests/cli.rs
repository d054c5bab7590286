use std::path::Path;
use std::process::{Command, Output};

fn pxt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pxt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn run_csv_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = pxt(&[
            "run", "--graph", "icosahedron", "--pattern", "uniform", "--scheme", "pxt", "--seed", "1", "--runs", "3",
            "--out", p(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = std::fs::read(a.join("results.csv")).unwrap();
    let second = std::fs::read(b.join("results.csv")).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("graph,pattern,scheme,seed,working,protection,total,runtime_ms\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn one_plus_one_row_on_k66() {
    let o = pxt(&["run", "--graph", "k66", "--pattern", "neighbor", "--scheme", "one-plus-one"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "graph,pattern,scheme,seed,working,protection,total,runtime_ms\nk66,neighbor,one-plus-one,,360,1080,1440,\n"
    );
}

#[test]
fn route_validate_simulate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let o = pxt(&[
        "route", "--graph", "tietze", "--pattern", "neighbor", "--seed", "4", "--out", p(&plan),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = pxt(&["validate", "--graph", "tietze", p(&plan)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("VALID"));

    let o = pxt(&["simulate", "--graph", "tietze", p(&plan), "--out", p(dir.path())]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    let audit = std::fs::read_to_string(dir.path().join("audit.csv")).unwrap();
    assert!(audit.starts_with("failure,affected,switch_events,pass_through\n"));
    // 18 links and 12 nodes of the Tietze graph, one row each.
    assert_eq!(audit.lines().count(), 1 + 18 + 12);
}

#[test]
fn traffic_file_routes_like_the_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let traffic = dir.path().join("traffic.txt");
    let o = pxt(&["traffic", "--graph", "grid3x4", "--pattern", "neighbor", "--out", p(&traffic)]);
    assert!(o.status.success());
    let from_file = pxt(&["route", "--graph", "grid3x4", "--traffic", p(&traffic)]);
    let from_pattern = pxt(&["route", "--graph", "grid3x4", "--pattern", "neighbor"]);
    assert!(from_file.status.success() && from_pattern.status.success());
    assert_eq!(from_file.stdout, from_pattern.stdout);
}

#[test]
fn shared_path_plan_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let o = pxt(&[
        "route", "--graph", "k66", "--pattern", "uniform", "--scheme", "shared-path", "--out", p(&plan),
    ]);
    assert!(o.status.success());
    let o = pxt(&["validate", "--graph", "k66", p(&plan)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let limit = pxt(&["route", "--graph", "grid3x4", "--pattern", "uniform", "--max-work", "50"]);
    assert_eq!(limit.status.code(), Some(3));
    let unknown = pxt(&["run", "--graph", "no-such-graph", "--pattern", "uniform"]);
    assert_eq!(unknown.status.code(), Some(2));
    let usage = pxt(&["run", "--graph", "k66"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn missing_topology_data_is_reported() {
    let o = pxt(&["run", "--graph", "murakami_kim", "--pattern", "uniform"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("murakami_kim"));
}
