//! Single-failure restoration and plan audit.
//!
//! Restoration is modelled structurally: which demands switch to protection,
//! which cross-connects must be present for their protection paths, and
//! which nodes have to act. In a branch-point-free plan only the terminals of
//! affected demands ever act; every other node on an activated path simply
//! passes traffic through an existing cross-connect.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::graph::{EdgeId, Graph, LinkId, NodeId, Walk};
use crate::plan::{consecutive_pairs, AllocationPlan, Condition, SurvivabilityMode, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Failure {
    Link(LinkId),
    Node(NodeId),
}

impl Failure {
    /// `link:<u>-<v>` or `node:<x>`.
    pub fn label(self, g: &Graph) -> String {
        match self {
            Failure::Link(l) => {
                let link = g.link(l);
                format!("link:{}-{}", g.name(link.a), g.name(link.b))
            }
            Failure::Node(n) => format!("node:{}", g.name(n)),
        }
    }

    fn hits(self, w: &Walk) -> bool {
        match self {
            Failure::Link(l) => w.links().any(|x| x == l),
            Failure::Node(n) => w.nodes().contains(&n),
        }
    }

    fn hits_edge(self, g: &Graph, e: EdgeId) -> bool {
        match self {
            Failure::Link(l) => e.link == l,
            Failure::Node(n) => g.link(e.link).has_endpoint(n),
        }
    }
}

/// Every link, then every node in node mode.
pub fn enumerate_failures(g: &Graph, mode: SurvivabilityMode) -> Vec<Failure> {
    let mut out: Vec<Failure> = g.links().map(|(l, _)| Failure::Link(l)).collect();
    if mode == SurvivabilityMode::Node {
        out.extend(g.nodes().map(Failure::Node));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwitchAction {
    /// Bridge or select traffic onto the protection path.
    Bridge,
    /// Tear down a standing cross-connect so the protection path ends here.
    BreakCrossconnect { kept: EdgeId, broken: EdgeId },
    /// Pick one of several standing partners of an edge; only happens at a
    /// branch point.
    Select { from: EdgeId, to: EdgeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwitchEvent {
    pub demand: u32,
    pub node: NodeId,
    pub action: SwitchAction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Activation {
    pub demand: u32,
    pub protection: Walk,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RestorationResult {
    /// Demands whose working path is hit, in plan order.
    pub affected: Vec<u32>,
    /// Affected demands with a failed terminal; nothing can restore them.
    pub unrestorable: Vec<u32>,
    pub activated: Vec<Activation>,
    pub switch_events: Vec<SwitchEvent>,
    /// Interior nodes of activated protection paths, counted per path.
    pub pass_through: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FailsimError {
    #[error("plan is invalid ({} violations)", .0.len())]
    InvalidPlan(Vec<Violation>),
    #[error("demand {demand}: protection path is hit by the same failure")]
    ProtectionHit { demand: u32 },
    #[error("demand {demand}: missing cross-connect at node #{} between {a:?} and {b:?}", .node.index())]
    MissingCrossconnect { demand: u32, node: NodeId, a: EdgeId, b: EdgeId },
}

/// Restores every demand affected by `f`. The plan is not modified.
///
/// The plan must satisfy conditions a to c. Branch points are tolerated and
/// show up as [`SwitchAction::Select`] events at the branching node.
pub fn restore(plan: &AllocationPlan, f: Failure) -> Result<RestorationResult, FailsimError> {
    let violations: Vec<Violation> = plan
        .validate()
        .into_iter()
        .filter(|v| v.condition != Condition::D)
        .collect();
    if !violations.is_empty() {
        return Err(FailsimError::InvalidPlan(violations));
    }
    restore_valid(plan, f)
}

fn restore_valid(plan: &AllocationPlan, f: Failure) -> Result<RestorationResult, FailsimError> {
    let mut out = RestorationResult::default();
    for entry in plan.entries() {
        let d = entry.demand;
        if !f.hits(&entry.working) {
            continue;
        }
        out.affected.push(d.id);
        if matches!(f, Failure::Node(n) if d.is_terminal(n)) {
            out.unrestorable.push(d.id);
            continue;
        }
        let p = &entry.protection;
        if f.hits(p) {
            return Err(FailsimError::ProtectionHit { demand: d.id });
        }
        for (x, a, b) in consecutive_pairs(p) {
            let partners = plan.partners(x, a);
            if !partners.contains(&b) {
                return Err(FailsimError::MissingCrossconnect { demand: d.id, node: x, a, b });
            }
            if partners.len() > 1 || plan.partners(x, b).len() > 1 {
                out.switch_events.push(SwitchEvent {
                    demand: d.id,
                    node: x,
                    action: SwitchAction::Select { from: a, to: b },
                });
            }
        }
        let edges = p.edges();
        for (node, end_edge) in [(p.first(), edges[0]), (p.last(), edges[edges.len() - 1])] {
            out.switch_events.push(SwitchEvent {
                demand: d.id,
                node,
                action: SwitchAction::Bridge,
            });
            for &other in plan.partners(node, end_edge) {
                out.switch_events.push(SwitchEvent {
                    demand: d.id,
                    node,
                    action: SwitchAction::BreakCrossconnect {
                        kept: end_edge,
                        broken: other,
                    },
                });
            }
        }
        out.pass_through += p.interior().len();
        out.activated.push(Activation {
            demand: d.id,
            protection: p.clone(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditIssue {
    /// The restore step refused (protection hit, missing cross-connect).
    Restore(FailsimError),
    /// Two activated protection paths use the same edge.
    Contention { edge: EdgeId, demands: Vec<u32> },
    /// A node that is not a terminal of the demand had to act.
    NonTerminalSwitch { demand: u32, node: NodeId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditViolation {
    pub failure: Failure,
    pub issue: AuditIssue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub failure: Failure,
    pub affected: usize,
    pub unrestorable: usize,
    pub switch_events: usize,
    pub pass_through: usize,
    pub max_load: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub violations: Vec<AuditViolation>,
    /// Most activated paths on any one protection edge under any failure.
    pub max_load: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.max_load <= 1
    }

    /// Passed apart from switching at branch points, which plans that do
    /// not avoid them are allowed.
    pub fn passed_allowing_branch_points(&self) -> bool {
        self.max_load <= 1
            && self
                .violations
                .iter()
                .all(|v| matches!(v.issue, AuditIssue::NonTerminalSwitch { .. }))
    }

    pub fn to_csv(&self, g: &Graph) -> String {
        let mut s = String::from("failure,affected,switch_events,pass_through\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.failure.label(g), r.affected, r.switch_events, r.pass_through);
        }
        s
    }

    pub fn to_text(&self, g: &Graph) -> String {
        let mut s = String::new();
        let affected: usize = self.rows.iter().map(|r| r.affected).sum();
        let switches: usize = self.rows.iter().map(|r| r.switch_events).sum();
        let unrestorable: usize = self.rows.iter().map(|r| r.unrestorable).sum();
        let _ = writeln!(s, "failures {}", self.rows.len());
        let _ = writeln!(s, "affected {affected}");
        let _ = writeln!(s, "unrestorable {unrestorable}");
        let _ = writeln!(s, "switch-events {switches}");
        let _ = writeln!(s, "max-load {}", self.max_load);
        let _ = writeln!(s, "violations {}", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(s, "  {} {}", v.failure.label(g), IssueText(g, &v.issue));
        }
        let _ = writeln!(s, "{}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

struct IssueText<'a>(&'a Graph, &'a AuditIssue);

impl fmt::Display for IssueText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0;
        match self.1 {
            AuditIssue::Restore(FailsimError::MissingCrossconnect { demand, node, a, b }) => write!(
                f,
                "demand {demand}: missing cross-connect at {} between {} and {}",
                g.name(*node),
                g.edge_label(*a),
                g.edge_label(*b)
            ),
            AuditIssue::Restore(e) => write!(f, "{e}"),
            AuditIssue::Contention { edge, demands } => {
                let ds: Vec<String> = demands.iter().map(|d| d.to_string()).collect();
                write!(f, "contention on {} by demands {}", g.edge_label(*edge), ds.join(" "))
            }
            AuditIssue::NonTerminalSwitch { demand, node } => {
                write!(f, "demand {demand}: switch at non-terminal {}", g.name(*node))
            }
        }
    }
}

/// Restores every single failure and checks contention-freedom, complete
/// cross-connection and endnode-only switching.
///
/// Unlike [`restore`] this does not insist on a valid plan: the point is to
/// show what a broken plan would do under failure.
pub fn audit(plan: &AllocationPlan) -> AuditReport {
    let g = plan.graph();
    let terminals: HashMap<u32, (NodeId, NodeId)> =
        plan.entries().iter().map(|e| (e.demand.id, e.demand.terminals())).collect();
    let mut report = AuditReport {
        rows: Vec::new(),
        violations: Vec::new(),
        max_load: 0,
    };
    for f in enumerate_failures(g, plan.mode()) {
        let r = match restore_valid(plan, f) {
            Ok(r) => r,
            Err(e) => {
                report.violations.push(AuditViolation {
                    failure: f,
                    issue: AuditIssue::Restore(e),
                });
                continue;
            }
        };
        let mut load: HashMap<EdgeId, Vec<u32>> = HashMap::new();
        for a in &r.activated {
            for &e in a.protection.edges() {
                debug_assert!(!f.hits_edge(g, e));
                load.entry(e).or_default().push(a.demand);
            }
        }
        let mut contended: Vec<(EdgeId, Vec<u32>)> = load.iter().filter(|(_, d)| d.len() > 1).map(|(e, d)| (*e, d.clone())).collect();
        contended.sort();
        for (edge, demands) in contended {
            report.violations.push(AuditViolation {
                failure: f,
                issue: AuditIssue::Contention { edge, demands },
            });
        }
        for ev in &r.switch_events {
            let (u, v) = terminals[&ev.demand];
            if ev.node != u && ev.node != v {
                report.violations.push(AuditViolation {
                    failure: f,
                    issue: AuditIssue::NonTerminalSwitch {
                        demand: ev.demand,
                        node: ev.node,
                    },
                });
            }
        }
        let max_load = load.values().map(Vec::len).max().unwrap_or(0);
        report.max_load = report.max_load.max(max_load);
        report.rows.push(AuditRow {
            failure: f,
            affected: r.affected.len(),
            unrestorable: r.unrestorable.len(),
            switch_events: r.switch_events.len(),
            pass_through: r.pass_through,
            max_load,
        });
    }
    report
}
