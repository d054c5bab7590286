use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pxt_core::cdijkstra::SearchLimits;
use pxt_core::experiment::{
    self, benchmark_large_nodes, route_scheme, table1_csv, table1_text, ExperimentConfig, ExperimentError,
    Scheme, Table1Config,
};
use pxt_core::failsim::audit;
use pxt_core::graph::{standard_topology, Graph, NodeId, Topology, TOPOLOGY_NAMES};
use pxt_core::plan::{AllocationPlan, SurvivabilityMode};
use pxt_core::router::{RouteError, Router, RouterConfig};
use pxt_core::traffic::{self, Pattern, PatternKind, TrafficSpec};

/// Exit status for a failed check (validation or audit).
const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "pxt", version, about = "Shared mesh protection with pre-cross-connected trails")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the benchmark topologies, or print one as a graph file.
    Topo(TopoArgs),
    /// Write a traffic file for a graph and pattern.
    Traffic(TrafficArgs),
    /// Route one instance and write the plan file.
    Route(RouteArgs),
    /// Check a plan file against the plan conditions.
    Validate(PlanFileArgs),
    /// Run every single failure against a plan file.
    Simulate(SimulateArgs),
    /// Route an instance for one or more seeds and report bandwidth.
    Run(RunArgs),
    /// Run the whole benchmark grid against the reference values.
    Table1(Table1Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Pxt,
    OnePlusOne,
    SharedPath,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Pxt => Scheme::Pxt,
            SchemeArg::OnePlusOne => Scheme::OnePlusOne,
            SchemeArg::SharedPath => Scheme::SharedPath,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Uniform,
    Neighbor,
    Unbalanced,
}

impl From<PatternArg> for PatternKind {
    fn from(p: PatternArg) -> PatternKind {
        match p {
            PatternArg::Uniform => PatternKind::Uniform,
            PatternArg::Neighbor => PatternKind::Neighbor,
            PatternArg::Unbalanced => PatternKind::Unbalanced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Node,
    Link,
}

impl From<ModeArg> for SurvivabilityMode {
    fn from(m: ModeArg) -> SurvivabilityMode {
        match m {
            ModeArg::Node => SurvivabilityMode::Node,
            ModeArg::Link => SurvivabilityMode::Link,
        }
    }
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Benchmark topology name or path to a graph file.
    #[arg(long)]
    graph: String,
    /// Graph file for a named topology without a built-in fixture.
    #[arg(long)]
    topology_data: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TrafficSelect {
    #[arg(long, value_enum)]
    pattern: Option<PatternArg>,
    /// Comma-separated large nodes for unbalanced traffic.
    #[arg(long, value_delimiter = ',')]
    large: Option<Vec<String>>,
    /// Traffic file to route instead of a generated pattern.
    #[arg(long, conflicts_with = "pattern")]
    traffic: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    #[arg(long, default_value_t = SearchLimits::default().max_partial_paths)]
    max_partial_paths: usize,
    #[arg(long, default_value_t = SearchLimits::default().max_work)]
    max_work: u64,
}

impl From<LimitArgs> for SearchLimits {
    fn from(l: LimitArgs) -> SearchLimits {
        SearchLimits {
            max_partial_paths: l.max_partial_paths,
            max_work: l.max_work,
        }
    }
}

#[derive(Args)]
struct TopoArgs {
    /// Topology to print; lists all when omitted.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    topology_data: Option<PathBuf>,
    /// Print summary figures instead of the graph file.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct TrafficArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    pattern: PatternArg,
    #[arg(long, value_delimiter = ',')]
    large: Option<Vec<String>>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    traffic: TrafficSelect,
    #[arg(long, value_enum, default_value = "pxt")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "node")]
    mode: ModeArg,
    /// Shuffle seed; base order when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Output plan file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    /// Print a per-demand routing trace to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct PlanFileArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Plan file.
    plan: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    plan: PathBuf,
    /// Directory for audit.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    pattern: PatternArg,
    #[arg(long, value_delimiter = ',')]
    large: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "pxt")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "node")]
    mode: ModeArg,
    /// First seed; with --runs n the seeds are seed..seed+n.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    /// Directory for results.csv; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    /// Fill the runtime_ms column.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct Table1Args {
    /// Graph file for the Murakami & Kim topology; its rows are skipped
    /// without it.
    #[arg(long)]
    murakami_kim: Option<PathBuf>,
    #[arg(long, value_enum)]
    pattern: Option<PatternArg>,
    #[arg(long, value_enum, default_value = "node")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    runs: u64,
    /// Directory for table1.csv and table1.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    verbose: bool,
}

/// A loaded graph with its report label and, for benchmark graphs, which
/// one it is.
struct LoadedGraph {
    graph: Arc<Graph>,
    label: String,
    topology: Option<Topology>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(args: &GraphArgs) -> Result<LoadedGraph> {
    if let Ok(topo) = args.graph.parse::<Topology>() {
        let data = args.topology_data.as_deref().map(read).transpose()?;
        let graph = standard_topology(topo.name(), data.as_deref())?;
        return Ok(LoadedGraph {
            graph: Arc::new(graph),
            label: topo.name().to_string(),
            topology: Some(topo),
        });
    }
    let path = Path::new(&args.graph);
    if !path.exists() {
        bail!(
            "--graph {}: neither a topology ({}) nor a file",
            args.graph,
            TOPOLOGY_NAMES.join(", ")
        );
    }
    let graph = Graph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph")
        .to_string();
    let topology = label.parse().ok();
    Ok(LoadedGraph {
        graph: Arc::new(graph),
        label,
        topology,
    })
}

fn large_nodes(lg: &LoadedGraph, names: Option<&[String]>) -> Result<Vec<NodeId>> {
    if let Some(names) = names {
        return names
            .iter()
            .map(|n| lg.graph.require(n).map_err(Into::into))
            .collect();
    }
    let topo = lg
        .topology
        .ok_or_else(|| anyhow!("unbalanced traffic on {} needs --large", lg.label))?;
    Ok(benchmark_large_nodes(topo, &lg.graph)?)
}

fn pattern(lg: &LoadedGraph, kind: PatternKind, large: Option<&[String]>) -> Result<Pattern> {
    let large = match kind {
        PatternKind::Unbalanced => Some(large_nodes(lg, large)?),
        _ => None,
    };
    Ok(Pattern::standard(kind, large)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_in(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
}

fn cmd_topo(args: TopoArgs) -> Result<ExitCode> {
    let Some(name) = args.graph else {
        for t in Topology::ALL {
            let note = if t.fixture().is_none() { "  (needs --topology-data)" } else { "" };
            println!("{:<14} {} links{note}", t.name(), t.link_count());
        }
        return Ok(ExitCode::SUCCESS);
    };
    let lg = load_graph(&GraphArgs {
        graph: name,
        topology_data: args.topology_data,
    })?;
    let g = &lg.graph;
    if args.stats {
        println!("graph {}", lg.label);
        println!("nodes {}", g.node_count());
        println!("links {}", g.link_count());
        match g.distance_sum() {
            Ok(s) => println!("distance-sum {s}"),
            Err(_) => println!("distance-sum disconnected"),
        }
        match g.girth() {
            Some(x) => println!("girth {x}"),
            None => println!("girth none"),
        }
    } else {
        print!("{}", g.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_traffic(args: TrafficArgs) -> Result<ExitCode> {
    let lg = load_graph(&args.graph)?;
    let p = pattern(&lg, args.pattern.into(), args.large.as_deref())?;
    let counts = traffic::pair_counts(&lg.graph, &p)?;
    write_or_print(args.out.as_deref(), &traffic::to_text(&lg.graph, &counts))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_route(args: RouteArgs) -> Result<ExitCode> {
    let lg = load_graph(&args.graph)?;
    let g = &lg.graph;
    let mut demands = match (&args.traffic.traffic, args.traffic.pattern) {
        (Some(path), _) => traffic::demands_from_counts(&traffic::parse(g, &read(path)?)?),
        (None, Some(kind)) => traffic::generate(
            g,
            &TrafficSpec {
                pattern: pattern(&lg, kind.into(), args.traffic.large.as_deref())?,
                seed: None,
            },
        )?,
        (None, None) => bail!("give --pattern or --traffic"),
    };
    if let Some(seed) = args.seed {
        traffic::shuffle(&mut demands, seed);
    }
    let mode: SurvivabilityMode = args.mode.into();
    let scheme: Scheme = args.scheme.into();
    let instance = format!("{} {}", lg.label, scheme);
    let plan = if scheme == Scheme::Pxt {
        let mut router = Router::new(
            g.clone(),
            mode,
            RouterConfig {
                limits: args.limits.into(),
                verbose: args.verbose,
            },
        );
        let mut failure = None;
        for d in &demands {
            if let Err(e) = router.route_demand(d) {
                failure = Some(e);
                break;
            }
        }
        for t in router.trace() {
            eprintln!("{t}");
        }
        if let Some(error) = failure {
            return Err(ExperimentError::Route { instance, error }.into());
        }
        router.into_plan()
    } else {
        route_scheme(g.clone(), mode, scheme, &demands, args.limits.into(), &instance)?
    };
    let text = format!("graph {}\n{}", lg.label, plan.to_text());
    write_or_print(args.out.as_deref(), &text)?;
    let bw = plan.bandwidth();
    eprintln!("working {} protection {} total {}", bw.working, bw.protection, bw.total);
    Ok(ExitCode::SUCCESS)
}

fn load_plan(args: &GraphArgs, path: &Path) -> Result<(LoadedGraph, AllocationPlan)> {
    let lg = load_graph(args)?;
    let plan = AllocationPlan::parse(lg.graph.clone(), &read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok((lg, plan))
}

fn cmd_validate(args: PlanFileArgs) -> Result<ExitCode> {
    let (lg, plan) = load_plan(&args.graph, &args.plan)?;
    let violations = plan.validate();
    let bw = plan.bandwidth();
    println!("entries {}", plan.len());
    println!("working {} protection {} total {}", bw.working, bw.protection, bw.total);
    println!("branch-points {}", plan.branch_points().len());
    println!("violations {}", violations.len());
    for v in &violations {
        println!("  {}", v.describe(&lg.graph));
    }
    Ok(if violations.is_empty() {
        println!("VALID");
        ExitCode::SUCCESS
    } else {
        println!("INVALID");
        ExitCode::from(EXIT_CHECK)
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let (lg, plan) = load_plan(&args.graph, &args.plan)?;
    let report = audit(&plan);
    print!("{}", report.to_text(&lg.graph));
    if let Some(dir) = &args.out {
        write_in(dir, "audit.csv", &report.to_csv(&lg.graph))?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK)
    })
}

fn seeds(seed: Option<u64>, runs: Option<u64>) -> Vec<Option<u64>> {
    match (seed, runs) {
        (None, None) => vec![None],
        (Some(s), None) => vec![Some(s)],
        (s, Some(n)) => {
            let first = s.unwrap_or(1);
            (0..n.max(1)).map(|i| Some(first + i)).collect()
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let lg = load_graph(&args.graph)?;
    let kind: PatternKind = args.pattern.into();
    let large = match kind {
        PatternKind::Unbalanced => Some(large_nodes(&lg, args.large.as_deref())?),
        _ => None,
    };
    let config = ExperimentConfig {
        graph: lg.graph.clone(),
        graph_label: lg.label.clone(),
        pattern: kind,
        large,
        scheme: args.scheme.into(),
        mode: args.mode.into(),
        seeds: seeds(args.seed, args.runs),
        limits: args.limits.into(),
        timing: args.timing,
        audit: true,
    };
    let report = experiment::run(&config)?;
    match &args.out {
        Some(dir) => {
            write_in(dir, "results.csv", &report.to_csv())?;
            print!("{}", report.to_table());
        }
        None => {
            print!("{}", report.to_csv());
            if args.verbose {
                eprint!("{}", report.to_table());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table1(args: Table1Args) -> Result<ExitCode> {
    let cfg = Table1Config {
        mode: args.mode.into(),
        murakami_kim: args.murakami_kim.as_deref().map(read).transpose()?,
        pattern: args.pattern.map(Into::into),
        seeds: (0..args.runs.max(1)).map(|i| args.seed + i).collect(),
        limits: args.limits.into(),
        timing: args.timing,
        audit: true,
    };
    let rows = experiment::table1(&cfg)?;
    let text = table1_text(&rows);
    print!("{text}");
    if let Some(dir) = &args.out {
        write_in(dir, "table1.txt", &text)?;
        write_in(dir, "table1.csv", &table1_csv(&rows))?;
    }
    if args.verbose {
        eprint!("{}", table1_csv(&rows));
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<ExperimentError>() {
        if e.is_resource_limit() {
            return EXIT_LIMIT;
        }
        if e.is_check_failure() {
            return EXIT_CHECK;
        }
    }
    if let Some(RouteError::SearchLimit { .. }) = err.downcast_ref::<RouteError>() {
        return EXIT_LIMIT;
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Topo(a) => cmd_topo(a),
        Command::Traffic(a) => cmd_traffic(a),
        Command::Route(a) => cmd_route(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Run(a) => cmd_run(a),
        Command::Table1(a) => cmd_table1(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
