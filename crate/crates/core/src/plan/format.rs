//! Plan file format.
//!
//! ```text
//! # comment
//! graph <source>                       (optional, informational)
//! mode node|link                       (optional, default node)
//! entry <id> <u> <v> | working <route> | protection <route>
//! pxt open|closed <route>
//! xc <node> <edge> <edge>
//! ```
//!
//! A route is a node list with per-hop edge ordinals, `A @0 B @1 C`; a hop
//! written without `@k` uses ordinal 0. Edges are written `u/v@k` with `u`,
//! `v` the link endpoints in node order. `pxt` and `xc` lines are derived
//! data: on parsing they are checked against the loaded entries. All `entry`
//! lines must precede the derived lines.

use std::sync::Arc;

use thiserror::Error;

use super::{canonical_set, AllocationPlan, Demand, PlanEntry, Pxt, SurvivabilityMode};
use crate::graph::{EdgeId, Graph, NodeId, Walk, WalkError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Walk { line: usize, source: WalkError },
    #[error("declared pxt lines do not match the entries")]
    PxtMismatch,
    #[error("declared xc lines do not match the entries")]
    CrossconnectMismatch,
}

fn syntax(line: usize, message: impl Into<String>) -> PlanFormatError {
    PlanFormatError::Syntax {
        line,
        message: message.into(),
    }
}

impl AllocationPlan {
    /// Serializes entries, then the derived PXTs (if the plan has no branch
    /// points), then all cross-connections.
    pub fn to_text(&self) -> String {
        let g = self.graph();
        let mut out = format!("mode {}\n", self.mode().as_str());
        for e in self.entries() {
            out.push_str(&entry_line(g, e));
            out.push('\n');
        }
        if let Ok(pxts) = self.pxts() {
            for p in pxts {
                let kind = if p.closed { "closed" } else { "open" };
                out.push_str(&format!("pxt {kind} {}\n", p.trail.to_text(g)));
            }
        }
        for (x, a, b) in self.crossconnects() {
            out.push_str(&format!(
                "xc {} {} {}\n",
                g.name(x),
                g.edge_label(a),
                g.edge_label(b)
            ));
        }
        out
    }

    /// Parses a plan file against `graph`. Entries are loaded without checking
    /// conditions a-d; call [`AllocationPlan::validate`] afterwards.
    pub fn parse(graph: Arc<Graph>, text: &str) -> Result<AllocationPlan, PlanFormatError> {
        let mut mode = SurvivabilityMode::Node;
        let mut entries = Vec::new();
        let mut declared_pxts: Option<Vec<Pxt>> = None;
        let mut declared_xc: Option<Vec<(NodeId, EdgeId, EdgeId)>> = None;
        let g = &*graph;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            match keyword {
                "graph" => {}
                "mode" => {
                    if !entries.is_empty() {
                        return Err(syntax(line, "mode must precede entries"));
                    }
                    mode = rest.parse().map_err(|m: String| syntax(line, m))?;
                }
                "entry" => {
                    if declared_pxts.is_some() || declared_xc.is_some() {
                        return Err(syntax(line, "entry after derived lines"));
                    }
                    entries.push(parse_entry(g, line, rest)?);
                }
                "pxt" => {
                    let (kind, route) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| syntax(line, "expected `pxt open|closed <route>`"))?;
                    let closed = match kind {
                        "open" => false,
                        "closed" => true,
                        _ => return Err(syntax(line, format!("unknown pxt kind `{kind}`"))),
                    };
                    let trail = parse_route(g, line, route)?;
                    declared_pxts.get_or_insert_with(Vec::new).push(Pxt { trail, closed });
                }
                "xc" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    if f.len() != 3 {
                        return Err(syntax(line, "expected `xc <node> <edge> <edge>`"));
                    }
                    let x = g
                        .node(f[0])
                        .ok_or_else(|| syntax(line, format!("unknown node `{}`", f[0])))?;
                    let edge = |s: &str| {
                        g.parse_edge_label(s)
                            .ok_or_else(|| syntax(line, format!("bad edge `{s}`")))
                    };
                    let (a, b) = (edge(f[1])?, edge(f[2])?);
                    declared_xc.get_or_insert_with(Vec::new).push((x, a.min(b), a.max(b)));
                }
                _ => return Err(syntax(line, format!("unknown keyword `{keyword}`"))),
            }
        }

        let mut plan = AllocationPlan::new(graph.clone(), mode);
        for e in entries {
            plan.push_unchecked(e);
        }
        if let Some(mut xc) = declared_xc {
            xc.sort();
            if xc != plan.crossconnects() {
                return Err(PlanFormatError::CrossconnectMismatch);
            }
        }
        if let Some(pxts) = declared_pxts {
            let derived = plan.extract_pxts().map_err(|_| PlanFormatError::PxtMismatch)?;
            if canonical_set(&pxts) != canonical_set(&derived) {
                return Err(PlanFormatError::PxtMismatch);
            }
        }
        Ok(plan)
    }
}

/// One `entry` line, as written by [`AllocationPlan::to_text`].
pub fn entry_line(g: &Graph, e: &PlanEntry) -> String {
    format!(
        "entry {} {} {} | working {} | protection {}",
        e.demand.id,
        g.name(e.demand.u),
        g.name(e.demand.v),
        e.working.to_text(g),
        e.protection.to_text(g)
    )
}

fn parse_entry(g: &Graph, line: usize, rest: &str) -> Result<PlanEntry, PlanFormatError> {
    let parts: Vec<&str> = rest.split('|').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(syntax(line, "expected `entry <id> <u> <v> | working .. | protection ..`"));
    }
    let head: Vec<&str> = parts[0].split_whitespace().collect();
    if head.len() != 3 {
        return Err(syntax(line, "expected `<id> <u> <v>`"));
    }
    let id: u32 = head[0]
        .parse()
        .map_err(|_| syntax(line, format!("bad demand id `{}`", head[0])))?;
    let node = |s: &str| {
        g.node(s)
            .ok_or_else(|| syntax(line, format!("unknown node `{s}`")))
    };
    let demand = Demand::new(id, node(head[1])?, node(head[2])?)
        .ok_or_else(|| syntax(line, "demand terminals must differ"))?;
    let route = |part: &str, key: &str| {
        part.strip_prefix(key)
            .ok_or_else(|| syntax(line, format!("expected `{key} <route>`")))
            .and_then(|r| parse_route(g, line, r))
    };
    Ok(PlanEntry {
        demand,
        working: route(parts[1], "working")?,
        protection: route(parts[2], "protection")?,
    })
}

pub(super) fn parse_route(g: &Graph, line: usize, text: &str) -> Result<Walk, PlanFormatError> {
    let mut nodes = Vec::new();
    let mut ordinals = Vec::new();
    let mut pending: Option<u32> = None;
    for tok in text.split_whitespace() {
        if let Some(k) = tok.strip_prefix('@') {
            if nodes.is_empty() || pending.is_some() {
                return Err(syntax(line, format!("misplaced ordinal `{tok}`")));
            }
            pending = Some(k.parse().map_err(|_| syntax(line, format!("bad ordinal `{tok}`")))?);
        } else {
            let n = g
                .node(tok)
                .ok_or_else(|| syntax(line, format!("unknown node `{tok}`")))?;
            if !nodes.is_empty() {
                ordinals.push(pending.take().unwrap_or(0));
            }
            nodes.push(n);
        }
    }
    if nodes.is_empty() || pending.is_some() {
        return Err(syntax(line, "route must start and end with a node"));
    }
    let mut edges = Vec::with_capacity(ordinals.len());
    for (w, k) in nodes.windows(2).zip(ordinals) {
        let link = g.link_between(w[0], w[1]).ok_or_else(|| {
            syntax(line, format!("no link {} {}", g.name(w[0]), g.name(w[1])))
        })?;
        edges.push(EdgeId::new(link, k));
    }
    Walk::new(g, nodes, edges).map_err(|source| PlanFormatError::Walk { line, source })
}
