use std::collections::{HashMap, HashSet};

use crate::graph::{EdgeId, Graph, NodeId, Walk};

/// A pre-cross-connected trail of protection edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pxt {
    pub trail: Walk,
    pub closed: bool,
}

impl Pxt {
    /// Direction- and rotation-independent key, for comparing PXT sets.
    pub fn canonical_edges(&self) -> Vec<EdgeId> {
        let fwd: Vec<EdgeId> = self.trail.edges().to_vec();
        let mut rev = fwd.clone();
        rev.reverse();
        if !self.closed {
            return fwd.min(rev);
        }
        let n = fwd.len();
        let mut best = fwd.clone();
        for seq in [&fwd, &rev] {
            for r in 0..n {
                let rotated: Vec<EdgeId> = seq[r..].iter().chain(&seq[..r]).copied().collect();
                if rotated < best {
                    best = rotated;
                }
            }
        }
        best
    }

    /// Node occurrences along the trail; a closed trail lists its start once.
    pub fn occurrences(&self) -> &[NodeId] {
        let nodes = self.trail.nodes();
        if self.closed {
            &nodes[..nodes.len() - 1]
        } else {
            nodes
        }
    }
}

/// Sorted canonical keys of a PXT list.
pub fn canonical_set(pxts: &[Pxt]) -> Vec<(bool, Vec<EdgeId>)> {
    let mut keys: Vec<(bool, Vec<EdgeId>)> = pxts
        .iter()
        .map(|p| (p.closed, p.canonical_edges()))
        .collect();
    keys.sort();
    keys
}

/// Trails grown at their ends as protection paths are added.
#[derive(Clone, Debug, Default)]
pub(super) struct PxtSet {
    trails: Vec<Option<Pxt>>,
    owner: HashMap<EdgeId, usize>,
}

impl PxtSet {
    pub(super) fn trails(&self) -> Vec<Pxt> {
        let mut out: Vec<Pxt> = self.trails.iter().flatten().cloned().collect();
        out.sort_by_key(|p| p.canonical_edges());
        out
    }

    /// Folds in a protection path whose new cross-connections are `new_pairs`.
    /// Returns false if the pairs do not join trail ends, which happens only
    /// for plans with branch points or malformed protection routes.
    pub(super) fn absorb(
        &mut self,
        path: &Walk,
        new_pairs: &[(NodeId, EdgeId, EdgeId)],
    ) -> bool {
        for (i, &e) in path.edges().iter().enumerate() {
            if !self.owner.contains_key(&e) {
                let nodes = vec![path.nodes()[i], path.nodes()[i + 1]];
                self.owner.insert(e, self.trails.len());
                self.trails.push(Some(Pxt {
                    trail: Walk::from_parts(nodes, vec![e]),
                    closed: false,
                }));
            }
        }
        for &(x, a, b) in new_pairs {
            if !self.join(x, a, b) {
                return false;
            }
        }
        true
    }

    fn join(&mut self, x: NodeId, a: EdgeId, b: EdgeId) -> bool {
        let (i, j) = (self.owner[&a], self.owner[&b]);
        if i == j {
            let t = self.trails[i].as_mut().unwrap();
            let (nodes, edges) = (t.trail.nodes(), t.trail.edges());
            let ends_ok = !t.closed
                && nodes[0] == x
                && *nodes.last().unwrap() == x
                && ((edges[0] == a && *edges.last().unwrap() == b)
                    || (edges[0] == b && *edges.last().unwrap() == a));
            if ends_ok {
                t.closed = true;
            }
            return ends_ok;
        }
        let (Some(left), Some(right)) = (
            self.trails[i].take().and_then(|t| orient_end(t, a, x)),
            self.trails[j].take().and_then(|t| orient_end(t, b, x)),
        ) else {
            return false;
        };
        // left ends at x with a; right ends at x with b, so reverse it.
        let right = right.reversed();
        let mut nodes = left.nodes().to_vec();
        let mut edges = left.edges().to_vec();
        nodes.extend_from_slice(&right.nodes()[1..]);
        edges.extend_from_slice(right.edges());
        for e in &edges {
            self.owner.insert(*e, i);
        }
        self.trails[i] = Some(Pxt {
            trail: Walk::from_parts(nodes, edges),
            closed: false,
        });
        true
    }
}

/// Orients an open trail so it ends with edge `e` at node `x`.
fn orient_end(t: Pxt, e: EdgeId, x: NodeId) -> Option<Walk> {
    if t.closed {
        return None;
    }
    let w = t.trail;
    if *w.edges().last().unwrap() == e && w.last() == x {
        Some(w)
    } else if w.edges()[0] == e && w.first() == x {
        Some(w.reversed())
    } else {
        None
    }
}

/// Decomposes protection edges into PXTs given a partner function that
/// returns the unique cross-connected edge of `e` at `x`, if any.
pub(super) fn extract(
    g: &Graph,
    protection: &[EdgeId],
    partner: impl Fn(NodeId, EdgeId) -> Option<EdgeId>,
) -> Vec<Pxt> {
    let mut visited: HashSet<EdgeId> = HashSet::new();
    let mut out = Vec::new();

    let traverse = |start: EdgeId, from: NodeId, visited: &mut HashSet<EdgeId>| {
        let mut nodes = vec![from];
        let mut edges = Vec::new();
        let (mut e, mut at) = (start, from);
        loop {
            visited.insert(e);
            let next_node = g.link(e.link).other(at);
            edges.push(e);
            nodes.push(next_node);
            match partner(next_node, e) {
                Some(f) if f == start && next_node == from => break,
                Some(f) if !visited.contains(&f) => {
                    e = f;
                    at = next_node;
                }
                _ => break,
            }
        }
        Walk::from_parts(nodes, edges)
    };

    // Open trails first, each started from a free end.
    for &e in protection {
        let l = g.link(e.link);
        for x in [l.a, l.b] {
            if !visited.contains(&e) && partner(x, e).is_none() {
                let trail = traverse(e, x, &mut visited);
                out.push(Pxt {
                    trail,
                    closed: false,
                });
            }
        }
    }
    // Whatever is left is closed.
    for &e in protection {
        if !visited.contains(&e) {
            let trail = traverse(e, g.link(e.link).a, &mut visited);
            debug_assert_eq!(trail.first(), trail.last());
            out.push(Pxt {
                trail,
                closed: true,
            });
        }
    }
    out.sort_by_key(|p| p.canonical_edges());
    out
}
