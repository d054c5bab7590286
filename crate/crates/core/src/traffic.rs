//! Demand lists for the benchmark experiments.
//!
//! The base order is deterministic: terminal pairs in lexicographic order of
//! node index, with all copies of a pair consecutive. An optional seed
//! shuffles the list with [`SplitMix64`] and a Fisher–Yates pass, so a given
//! seed yields the same permutation on every platform.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::plan::Demand;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrafficError {
    #[error("unbalanced traffic needs a set of large nodes")]
    NoLargeNodes,
    #[error("large node listed twice: {0}")]
    DuplicateLargeNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("copy counts must be positive")]
    ZeroCopies,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown traffic pattern {0:?}")]
    UnknownPattern(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    Uniform,
    Neighbor,
    Unbalanced,
}

impl PatternKind {
    pub const ALL: [PatternKind; 3] = [PatternKind::Uniform, PatternKind::Neighbor, PatternKind::Unbalanced];

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Uniform => "uniform",
            PatternKind::Neighbor => "neighbor",
            PatternKind::Unbalanced => "unbalanced",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternKind {
    type Err = TrafficError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| TrafficError::UnknownPattern(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Every pair of nodes, `copies` times.
    Uniform { copies: u32 },
    /// Every pair of adjacent nodes, `copies` times.
    Neighbor { copies: u32 },
    /// Every pair, with multiplicity by how many endpoints are large.
    Unbalanced {
        large: Vec<NodeId>,
        small_small: u32,
        small_large: u32,
        large_large: u32,
    },
}

impl Pattern {
    /// The benchmark pattern of the given kind: uniform 5, neighbor 10,
    /// unbalanced 2/8/14.
    pub fn standard(kind: PatternKind, large: Option<Vec<NodeId>>) -> Result<Pattern, TrafficError> {
        Ok(match kind {
            PatternKind::Uniform => Pattern::Uniform { copies: 5 },
            PatternKind::Neighbor => Pattern::Neighbor { copies: 10 },
            PatternKind::Unbalanced => Pattern::Unbalanced {
                large: large.ok_or(TrafficError::NoLargeNodes)?,
                small_small: 2,
                small_large: 8,
                large_large: 14,
            },
        })
    }

    pub fn kind(&self) -> PatternKind {
        match self {
            Pattern::Uniform { .. } => PatternKind::Uniform,
            Pattern::Neighbor { .. } => PatternKind::Neighbor,
            Pattern::Unbalanced { .. } => PatternKind::Unbalanced,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrafficSpec {
    pub pattern: Pattern,
    pub seed: Option<u64>,
}

/// The SplitMix64 generator (Steele, Lea and Flood), with its usual
/// increment `0x9E3779B97F4A7C15` and finalizer constants.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish in `0..bound` by the multiply-shift reduction
    /// `(x * bound) >> 64`.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Fisher–Yates from the back: for i = n-1 down to 1, swap i with
/// `below(i + 1)`.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Terminal pairs with copy counts, in base order.
pub fn pair_counts(g: &Graph, pattern: &Pattern) -> Result<Vec<(NodeId, NodeId, u32)>, TrafficError> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let mut out = Vec::new();
    match pattern {
        Pattern::Uniform { copies } => {
            if *copies == 0 {
                return Err(TrafficError::ZeroCopies);
            }
            for (i, &a) in nodes.iter().enumerate() {
                for &b in &nodes[i + 1..] {
                    out.push((a, b, *copies));
                }
            }
        }
        Pattern::Neighbor { copies } => {
            if *copies == 0 {
                return Err(TrafficError::ZeroCopies);
            }
            for (i, &a) in nodes.iter().enumerate() {
                for &b in &nodes[i + 1..] {
                    if g.link_between(a, b).is_some() {
                        out.push((a, b, *copies));
                    }
                }
            }
        }
        Pattern::Unbalanced {
            large,
            small_small,
            small_large,
            large_large,
        } => {
            if large.is_empty() {
                return Err(TrafficError::NoLargeNodes);
            }
            if *small_small == 0 || *small_large == 0 || *large_large == 0 {
                return Err(TrafficError::ZeroCopies);
            }
            for (i, n) in large.iter().enumerate() {
                if n.index() >= g.node_count() {
                    return Err(TrafficError::UnknownNode(format!("#{}", n.index())));
                }
                if large[..i].contains(n) {
                    return Err(TrafficError::DuplicateLargeNode(g.name(*n).to_string()));
                }
            }
            for (i, &a) in nodes.iter().enumerate() {
                for &b in &nodes[i + 1..] {
                    let k = match (large.contains(&a), large.contains(&b)) {
                        (false, false) => *small_small,
                        (true, true) => *large_large,
                        _ => *small_large,
                    };
                    out.push((a, b, k));
                }
            }
        }
    }
    Ok(out)
}

fn expand(counts: &[(NodeId, NodeId, u32)]) -> Vec<Demand> {
    let mut out = Vec::new();
    for &(a, b, k) in counts {
        for _ in 0..k {
            out.push(Demand::new(out.len() as u32, a, b).expect("distinct terminals"));
        }
    }
    out
}

/// Demands in base order, shuffled if the spec carries a seed. Demand ids
/// are base-order positions, so they survive the shuffle.
pub fn generate(g: &Graph, spec: &TrafficSpec) -> Result<Vec<Demand>, TrafficError> {
    let mut demands = expand(&pair_counts(g, &spec.pattern)?);
    if let Some(seed) = spec.seed {
        shuffle(&mut demands, seed);
    }
    Ok(demands)
}

pub fn to_text(g: &Graph, counts: &[(NodeId, NodeId, u32)]) -> String {
    counts
        .iter()
        .map(|&(a, b, k)| format!("demand {} {} {k}\n", g.name(a), g.name(b)))
        .collect()
}

/// Parses `demand <u> <v> <count>` lines; `#` starts a comment.
pub fn parse(g: &Graph, text: &str) -> Result<Vec<(NodeId, NodeId, u32)>, TrafficError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| TrafficError::Syntax {
            line: i + 1,
            message: message.to_string(),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [kw, u, v, k] = parts[..] else {
            return Err(syntax("expected `demand <u> <v> <count>`"));
        };
        if kw != "demand" {
            return Err(syntax("expected `demand <u> <v> <count>`"));
        }
        let node = |s: &str| g.node(s).ok_or_else(|| TrafficError::UnknownNode(s.to_string()));
        let (a, b) = (node(u)?, node(v)?);
        if a == b {
            return Err(syntax("terminals must differ"));
        }
        let k: u32 = k.parse().map_err(|_| syntax("count must be a non-negative integer"))?;
        out.push((a, b, k));
    }
    Ok(out)
}

/// Demands from a parsed traffic file, in file order.
pub fn demands_from_counts(counts: &[(NodeId, NodeId, u32)]) -> Vec<Demand> {
    expand(counts)
}
