use crate::graph::{NodeId, Walk};
use crate::plan::{Demand, Pxt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// An occurrence of one of the demand's terminals.
    Terminal(NodeId),
    /// An end of an open PXT.
    TrailEnd(NodeId),
}

impl Boundary {
    pub fn node(self) -> NodeId {
        match self {
            Boundary::Terminal(n) | Boundary::TrailEnd(n) => n,
        }
    }
}

/// A contiguous piece of a PXT between two consecutive boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtrail {
    pub walk: Walk,
    pub start: Boundary,
    pub end: Boundary,
    /// Index of the parent PXT in the list it was cut from.
    pub pxt: usize,
}

/// Cuts every PXT at each occurrence of the demand's terminals and, for open
/// PXTs, at both trail ends. Closed PXTs must contain both terminals to
/// contribute. Pieces that are not paths are returned too; callers filter.
pub fn segments(pxts: &[Pxt], d: &Demand) -> Vec<Subtrail> {
    let mut out = Vec::new();
    for (k, pxt) in pxts.iter().enumerate() {
        let nodes = pxt.trail.nodes();
        let edges = pxt.trail.edges();
        let m = edges.len();
        let occurrences = pxt.occurrences();
        let hit = |i: usize| d.is_terminal(nodes[i]);
        if pxt.closed {
            let has = |t: NodeId| occurrences.contains(&t);
            if !(has(d.u) && has(d.v)) {
                continue;
            }
            let cuts: Vec<usize> = (0..m).filter(|&i| hit(i)).collect();
            for (j, &a) in cuts.iter().enumerate() {
                let b = cuts[(j + 1) % cuts.len()];
                let span = if b > a { b - a } else { b + m - a };
                let idx: Vec<usize> = (0..span).map(|t| (a + t) % m).collect();
                let seg_nodes: Vec<NodeId> = idx
                    .iter()
                    .map(|&i| nodes[i])
                    .chain(std::iter::once(nodes[b]))
                    .collect();
                let seg_edges = idx.iter().map(|&i| edges[i]).collect();
                out.push(Subtrail {
                    walk: Walk::from_parts(seg_nodes, seg_edges),
                    start: Boundary::Terminal(nodes[a]),
                    end: Boundary::Terminal(nodes[b]),
                    pxt: k,
                });
            }
        } else {
            let boundary = |i: usize| {
                if hit(i) {
                    Boundary::Terminal(nodes[i])
                } else {
                    Boundary::TrailEnd(nodes[i])
                }
            };
            let mut cuts: Vec<usize> = (1..m).filter(|&i| hit(i)).collect();
            cuts.insert(0, 0);
            cuts.push(m);
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                out.push(Subtrail {
                    walk: Walk::from_parts(nodes[a..=b].to_vec(), edges[a..b].to_vec()),
                    start: boundary(a),
                    end: boundary(b),
                    pxt: k,
                });
            }
        }
    }
    out
}
