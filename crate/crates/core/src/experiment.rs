//! Bandwidth experiments: route a traffic pattern under one scheme for a
//! list of seeds, check every plan, and report working and protection
//! bandwidth. [`table1`] runs the full benchmark grid against the reference
//! values.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::baselines::{route_1plus1, route_shared_path, BaselineError};
use crate::cdijkstra::SearchLimits;
use crate::failsim::audit;
use crate::graph::{default_large_nodes, standard_topology, Graph, GraphError, NodeId, Topology};
use crate::plan::{AllocationPlan, Condition, SurvivabilityMode};
use crate::router::{RouteError, Router, RouterConfig};
use crate::traffic::{generate, pair_counts, Pattern, PatternKind, TrafficError, TrafficSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    OnePlusOne,
    SharedPath,
    Pxt,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::OnePlusOne, Scheme::SharedPath, Scheme::Pxt];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OnePlusOne => "one-plus-one",
            Scheme::SharedPath => "shared-path",
            Scheme::Pxt => "pxt",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| ExperimentError::UnknownScheme(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error("{instance}: {error}")]
    Baseline { instance: String, error: BaselineError },
    #[error("{instance}: {error}")]
    Route { instance: String, error: RouteError },
    #[error("{instance}: plan violates {count} conditions, first: {first}")]
    Invalid { instance: String, count: usize, first: String },
    #[error("{instance}: restoration audit failed:\n{report}")]
    Audit { instance: String, report: String },
    #[error("no set of {size} large nodes gives unbalanced working bandwidth {target}")]
    NoLargeNodeSet { size: usize, target: u64 },
    #[error("working bandwidth differs between schemes on {instance}: {a} vs {b}")]
    WorkingMismatch { instance: String, a: u64, b: u64 },
}

impl ExperimentError {
    /// A search hit its configured limits rather than failing outright.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            ExperimentError::Route {
                error: RouteError::SearchLimit { .. },
                ..
            }
        )
    }

    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            ExperimentError::Invalid { .. } | ExperimentError::Audit { .. } | ExperimentError::WorkingMismatch { .. }
        )
    }
}

/// One routed instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub graph: String,
    pub pattern: PatternKind,
    pub scheme: Scheme,
    pub seed: Option<u64>,
    pub working: u64,
    pub protection: u64,
    pub total: u64,
    pub runtime_ms: Option<f64>,
}

pub const CSV_HEADER: &str = "graph,pattern,scheme,seed,working,protection,total,runtime_ms";

impl RunRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.graph,
            self.pattern,
            self.scheme,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.working,
            self.protection,
            self.total,
            self.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default()
        )
    }
}

pub fn to_csv(rows: &[RunRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub graph: Arc<Graph>,
    pub graph_label: String,
    pub pattern: PatternKind,
    /// Large nodes for unbalanced traffic.
    pub large: Option<Vec<NodeId>>,
    pub scheme: Scheme,
    pub mode: SurvivabilityMode,
    /// `None` routes the demands in base order.
    pub seeds: Vec<Option<u64>>,
    pub limits: SearchLimits,
    /// Record wall-clock routing time per run.
    pub timing: bool,
    /// Run the restoration audit on every plan.
    pub audit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub min: u64,
    pub median: u64,
    pub max: u64,
}

/// Median of the protection values; for an even count, the lower middle.
pub fn summarize(values: &[u64]) -> Option<Summary> {
    let mut v = values.to_vec();
    v.sort_unstable();
    Some(Summary {
        min: *v.first()?,
        median: v[(v.len() - 1) / 2],
        max: *v.last()?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<RunRow>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        to_csv(&self.rows)
    }

    pub fn protection_summary(&self) -> Option<Summary> {
        summarize(&self.rows.iter().map(|r| r.protection).collect::<Vec<_>>())
    }

    /// One line per run plus a min/median/max line.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14} {:<11} {:<13} {:>6} {:>8} {:>10} {:>6}", "graph", "pattern", "scheme", "seed", "working", "protection", "total");
        for r in &self.rows {
            let seed = r.seed.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:<14} {:<11} {:<13} {:>6} {:>8} {:>10} {:>6}",
                r.graph, r.pattern, r.scheme, seed, r.working, r.protection, r.total
            );
        }
        if let Some(sum) = self.protection_summary() {
            let _ = writeln!(s, "protection min {} median {} max {}", sum.min, sum.median, sum.max);
        }
        s
    }
}

/// Routes `demands` under `scheme`, without checking the result.
pub fn route_scheme(
    graph: Arc<Graph>,
    mode: SurvivabilityMode,
    scheme: Scheme,
    demands: &[crate::plan::Demand],
    limits: SearchLimits,
    instance: &str,
) -> Result<AllocationPlan, ExperimentError> {
    let baseline = |error| ExperimentError::Baseline {
        instance: instance.to_string(),
        error,
    };
    match scheme {
        Scheme::OnePlusOne => route_1plus1(graph, mode, demands).map_err(baseline),
        Scheme::SharedPath => route_shared_path(graph, mode, demands).map_err(baseline),
        Scheme::Pxt => {
            let mut router = Router::new(graph, mode, RouterConfig { limits, verbose: false });
            for d in demands {
                router.route_demand(d).map_err(|error| ExperimentError::Route {
                    instance: instance.to_string(),
                    error,
                })?;
            }
            Ok(router.into_plan())
        }
    }
}

/// Condition check and audit appropriate to the scheme: the shared path
/// baseline may have branch points, the others may not.
pub fn check_plan(plan: &AllocationPlan, scheme: Scheme, run_audit: bool, instance: &str) -> Result<(), ExperimentError> {
    let allow_d = scheme == Scheme::SharedPath;
    let violations: Vec<_> = plan
        .validate()
        .into_iter()
        .filter(|v| !(allow_d && v.condition == Condition::D))
        .collect();
    if let Some(first) = violations.first() {
        return Err(ExperimentError::Invalid {
            instance: instance.to_string(),
            count: violations.len(),
            first: first.describe(plan.graph()),
        });
    }
    if run_audit {
        let report = audit(plan);
        let ok = if allow_d {
            report.passed_allowing_branch_points()
        } else {
            report.passed()
        };
        if !ok {
            return Err(ExperimentError::Audit {
                instance: instance.to_string(),
                report: report.to_text(plan.graph()),
            });
        }
    }
    Ok(())
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let pattern = Pattern::standard(config.pattern, config.large.clone())?;
    let mut rows = Vec::new();
    for &seed in &config.seeds {
        let instance = format!(
            "{} {} {} seed {}",
            config.graph_label,
            config.pattern,
            config.scheme,
            seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
        );
        let demands = generate(
            &config.graph,
            &TrafficSpec {
                pattern: pattern.clone(),
                seed,
            },
        )?;
        let start = Instant::now();
        let plan = route_scheme(config.graph.clone(), config.mode, config.scheme, &demands, config.limits, &instance)?;
        let elapsed = start.elapsed();
        check_plan(&plan, config.scheme, config.audit, &instance)?;
        let bw = plan.bandwidth();
        rows.push(RunRow {
            graph: config.graph_label.clone(),
            pattern: config.pattern,
            scheme: config.scheme,
            seed,
            working: bw.working as u64,
            protection: bw.protection as u64,
            total: bw.total as u64,
            runtime_ms: config.timing.then(|| elapsed.as_secs_f64() * 1e3),
        });
    }
    Ok(ExperimentReport { rows })
}

/// Working bandwidth of a pattern: each demand on a shortest path.
pub fn working_bandwidth(g: &Graph, pattern: &Pattern) -> Result<u64, ExperimentError> {
    let mut total = 0u64;
    let mut dist_cache: Vec<Option<Vec<Option<u32>>>> = vec![None; g.node_count()];
    for (a, b, k) in pair_counts(g, pattern)? {
        let d = dist_cache[a.index()].get_or_insert_with(|| g.bfs_distances(a, |_| true));
        total += k as u64 * d[b.index()].ok_or(GraphError::Disconnected)? as u64;
    }
    Ok(total)
}

/// The lexicographically first set of `size` nodes whose standard
/// unbalanced traffic has the given working bandwidth.
pub fn search_large_nodes(g: &Graph, size: usize, target: u64) -> Result<Vec<NodeId>, ExperimentError> {
    let n = g.node_count();
    let mut combo: Vec<usize> = (0..size).collect();
    if size == 0 || size > n {
        return Err(ExperimentError::NoLargeNodeSet { size, target });
    }
    loop {
        let large: Vec<NodeId> = combo.iter().map(|&i| NodeId(i as u32)).collect();
        let pattern = Pattern::standard(PatternKind::Unbalanced, Some(large.clone()))?;
        if working_bandwidth(g, &pattern)? == target {
            return Ok(large);
        }
        // Next combination in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return Err(ExperimentError::NoLargeNodeSet { size, target });
            }
            i -= 1;
            if combo[i] < n - size + i {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..size {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Reference values of the benchmark table: working, then protection for
/// 1+1, shared path and PXT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reference {
    pub topology: Topology,
    pub pattern: PatternKind,
    pub working: u64,
    pub one_plus_one: u64,
    pub path: u64,
    pub pxt: u64,
}

const fn reference(topology: Topology, pattern: PatternKind, v: [u64; 4]) -> Reference {
    Reference {
        topology,
        pattern,
        working: v[0],
        one_plus_one: v[1],
        path: v[2],
        pxt: v[3],
    }
}

pub const REFERENCE: [Reference; 18] = {
    use PatternKind::*;
    use Topology::*;
    [
        reference(Cycle12Plus3, Uniform, [840, 1440, 905, 894]),
        reference(Grid3x4, Uniform, [770, 1070, 495, 587]),
        reference(Tietze, Uniform, [645, 1125, 340, 362]),
        reference(MurakamiKim, Uniform, [600, 820, 560, 533]),
        reference(Icosahedron, Uniform, [540, 690, 280, 178]),
        reference(K66, Uniform, [480, 840, 365, 139]),
        reference(Cycle12Plus3, Neighbor, [150, 510, 150, 189]),
        reference(Grid3x4, Neighbor, [170, 510, 170, 236]),
        reference(Tietze, Neighbor, [180, 690, 170, 206]),
        reference(MurakamiKim, Neighbor, [240, 500, 220, 233]),
        reference(Icosahedron, Neighbor, [300, 600, 290, 205]),
        reference(K66, Neighbor, [360, 1080, 200, 188]),
        reference(Cycle12Plus3, Unbalanced, [768, 1368, 824, 794]),
        reference(Grid3x4, Unbalanced, [704, 1004, 594, 476]),
        reference(Tietze, Unbalanced, [636, 1152, 436, 395]),
        reference(MurakamiKim, Unbalanced, [516, 742, 450, 399]),
        reference(Icosahedron, Unbalanced, [540, 690, 356, 210]),
        reference(K66, Unbalanced, [480, 840, 378, 154]),
    ]
};

/// Relative tolerances per column.
pub const WORKING_TOLERANCE: f64 = 0.0;
pub const ONE_PLUS_ONE_TOLERANCE: f64 = 0.02;
pub const PATH_TOLERANCE: f64 = 0.10;
pub const PXT_TOLERANCE: f64 = 0.20;

/// 1+1 rows whose value is pinned exactly.
pub fn one_plus_one_exact(r: &Reference) -> bool {
    matches!(
        (r.topology, r.pattern),
        (Topology::K66, _) | (Topology::Icosahedron, PatternKind::Neighbor)
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Exact,
    InBand,
    OutOfBand,
    Skipped,
}

impl CellStatus {
    pub fn judge(value: u64, target: u64, tolerance: f64) -> CellStatus {
        if value == target {
            CellStatus::Exact
        } else if (value as f64 - target as f64).abs() <= tolerance * target as f64 {
            CellStatus::InBand
        } else {
            CellStatus::OutOfBand
        }
    }

    pub fn ok(self) -> bool {
        matches!(self, CellStatus::Exact | CellStatus::InBand)
    }

    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Exact => "exact",
            CellStatus::InBand => "in-band",
            CellStatus::OutOfBand => "OUT",
            CellStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub value: Option<u64>,
    pub target: u64,
    pub status: CellStatus,
}

impl Cell {
    fn skipped(target: u64) -> Cell {
        Cell {
            value: None,
            target,
            status: CellStatus::Skipped,
        }
    }

    fn judged(value: u64, target: u64, tolerance: f64) -> Cell {
        Cell {
            value: Some(value),
            target,
            status: CellStatus::judge(value, target, tolerance),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub reference: Reference,
    pub working: Cell,
    pub one_plus_one: Cell,
    pub path: Cell,
    pub pxt: Cell,
    /// Why the row was skipped, if it was.
    pub notice: Option<String>,
    /// Every run behind the row.
    pub runs: Vec<RunRow>,
}

#[derive(Clone, Debug)]
pub struct Table1Config {
    pub mode: SurvivabilityMode,
    /// Graph text for topologies without a built-in fixture.
    pub murakami_kim: Option<String>,
    pub pattern: Option<PatternKind>,
    /// Seeds for the order-dependent schemes (shared path and PXT).
    pub seeds: Vec<u64>,
    pub limits: SearchLimits,
    pub timing: bool,
    pub audit: bool,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            mode: SurvivabilityMode::Node,
            murakami_kim: None,
            pattern: None,
            seeds: (1..=10).collect(),
            limits: SearchLimits::default(),
            timing: false,
            audit: true,
        }
    }
}

/// Large nodes for a benchmark topology: the pinned set, or a searched one
/// matching the reference working value.
pub fn benchmark_large_nodes(topo: Topology, g: &Graph) -> Result<Vec<NodeId>, ExperimentError> {
    if let Some(names) = default_large_nodes(topo) {
        return names.iter().map(|n| Ok(g.require(n)?)).collect();
    }
    let target = REFERENCE
        .iter()
        .find(|r| r.topology == topo && r.pattern == PatternKind::Unbalanced)
        .expect("every topology has an unbalanced row")
        .working;
    search_large_nodes(g, 3, target)
}

fn table_row(r: &Reference, g: Arc<Graph>, cfg: &Table1Config) -> Result<TableRow, ExperimentError> {
    let large = match r.pattern {
        PatternKind::Unbalanced => Some(benchmark_large_nodes(r.topology, &g)?),
        _ => None,
    };
    let base = |scheme, seeds: Vec<Option<u64>>| ExperimentConfig {
        graph: g.clone(),
        graph_label: r.topology.name().to_string(),
        pattern: r.pattern,
        large: large.clone(),
        scheme,
        mode: cfg.mode,
        seeds,
        limits: cfg.limits,
        timing: cfg.timing,
        audit: cfg.audit,
    };
    let seeds: Vec<Option<u64>> = cfg.seeds.iter().map(|&s| Some(s)).collect();
    let one = run(&base(Scheme::OnePlusOne, vec![None]))?;
    let path = run(&base(Scheme::SharedPath, seeds.clone()))?;
    let pxt = run(&base(Scheme::Pxt, seeds))?;
    let working = one.rows[0].working;
    for row in path.rows.iter().chain(&pxt.rows) {
        if row.working != working {
            return Err(ExperimentError::WorkingMismatch {
                instance: format!("{} {}", r.topology, r.pattern),
                a: working,
                b: row.working,
            });
        }
    }
    let one_tol = if one_plus_one_exact(r) { 0.0 } else { ONE_PLUS_ONE_TOLERANCE };
    let median = |rep: &ExperimentReport| rep.protection_summary().expect("at least one seed").median;
    let mut runs = one.rows.clone();
    runs.extend(path.rows.iter().cloned());
    runs.extend(pxt.rows.iter().cloned());
    Ok(TableRow {
        reference: *r,
        working: Cell::judged(working, r.working, WORKING_TOLERANCE),
        one_plus_one: Cell::judged(one.rows[0].protection, r.one_plus_one, one_tol),
        path: Cell::judged(median(&path), r.path, PATH_TOLERANCE),
        pxt: Cell::judged(median(&pxt), r.pxt, PXT_TOLERANCE),
        notice: None,
        runs,
    })
}

/// Runs every reference row (optionally one pattern). Rows whose topology
/// has no data are returned as skipped with a notice.
pub fn table1(cfg: &Table1Config) -> Result<Vec<TableRow>, ExperimentError> {
    let mut out = Vec::new();
    for r in REFERENCE.iter().filter(|r| cfg.pattern.is_none_or(|p| p == r.pattern)) {
        let data = match r.topology {
            Topology::MurakamiKim => cfg.murakami_kim.as_deref(),
            _ => None,
        };
        let g = match standard_topology(r.topology.name(), data) {
            Ok(g) => Arc::new(g),
            Err(GraphError::MissingTopologyData(name)) => {
                out.push(TableRow {
                    reference: *r,
                    working: Cell::skipped(r.working),
                    one_plus_one: Cell::skipped(r.one_plus_one),
                    path: Cell::skipped(r.path),
                    pxt: Cell::skipped(r.pxt),
                    notice: Some(format!("skipped {name} {}: no graph data supplied", r.pattern)),
                    runs: Vec::new(),
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        out.push(table_row(r, g, cfg)?);
    }
    Ok(out)
}

fn cell_text(c: &Cell) -> String {
    match c.value {
        Some(v) => format!("{v} ({} {})", c.target, c.status.name()),
        None => format!("- ({} skipped)", c.target),
    }
}

/// Benchmark-table layout: pattern blocks, one line per topology, each
/// cell as `value (reference status)`.
pub fn table1_text(rows: &[TableRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<22} {:<22} {:<22} {:<22}",
        "", "Working", "1+1", "Path", "PXT"
    );
    let mut current = None;
    for row in rows {
        if current != Some(row.reference.pattern) {
            current = Some(row.reference.pattern);
            let _ = writeln!(s, "{}", row.reference.pattern.name().to_uppercase());
        }
        let _ = writeln!(
            s,
            "{:<14} {:<22} {:<22} {:<22} {:<22}",
            row.reference.topology.name(),
            cell_text(&row.working),
            cell_text(&row.one_plus_one),
            cell_text(&row.path),
            cell_text(&row.pxt)
        );
    }
    for row in rows {
        if let Some(n) = &row.notice {
            let _ = writeln!(s, "{n}");
        }
    }
    s
}

/// All runs behind the table, as CSV.
pub fn table1_csv(rows: &[TableRow]) -> String {
    let runs: Vec<RunRow> = rows.iter().flat_map(|r| r.runs.iter().cloned()).collect();
    to_csv(&runs)
}
