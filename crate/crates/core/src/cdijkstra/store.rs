//! Arena of partial paths plus per-node indices for domination checks.
//!
//! Partial paths at a node are bucketed by the size of their forbidden set.
//! Within one size, domination needs equal sets, found by hash lookup; across
//! sizes, a 64-bit signature of the set filters candidates before the exact
//! subset test.

use std::collections::{BTreeMap, HashMap};

use super::PathState;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub(super) struct Label {
    pub node: usize,
    pub length: u64,
    pub forbidden: Box<[u32]>,
    sig: u64,
    hash: u64,
    visit_sig: u128,
    parent: u32,
    arc: u32,
    pub state: PathState,
    pub alive: bool,
}

fn mix(h: u64, x: u64) -> u64 {
    (h ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15)).rotate_left(27).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

fn digest(set: &[u32]) -> (u64, u64) {
    let mut sig = 0u64;
    let mut hash = set.len() as u64;
    for &a in set {
        sig |= 1 << (a % 64);
        hash = mix(hash, a as u64);
    }
    (sig, hash)
}

impl Label {
    pub fn root(node: usize) -> Label {
        Label {
            node,
            length: 0,
            forbidden: Box::new([]),
            sig: 0,
            hash: 0,
            visit_sig: 1 << (node % 128),
            parent: NONE,
            arc: NONE,
            state: PathState::Penciled,
            alive: true,
        }
    }

    pub fn extend(parent: &Label, parent_id: u32, arc: usize, head: usize, length: u64, rivals: &[usize]) -> Label {
        let mut forbidden: Vec<u32> = Vec::with_capacity(parent.forbidden.len() + rivals.len());
        forbidden.extend_from_slice(&parent.forbidden);
        forbidden.extend(rivals.iter().map(|&r| r as u32));
        forbidden.sort_unstable();
        forbidden.dedup();
        let (sig, hash) = digest(&forbidden);
        Label {
            node: head,
            length: parent.length + length,
            forbidden: forbidden.into_boxed_slice(),
            sig,
            hash,
            visit_sig: parent.visit_sig | 1 << (head % 128),
            parent: parent_id,
            arc: arc as u32,
            state: PathState::Penciled,
            alive: true,
        }
    }

    pub fn forbids(&self, arc: usize) -> bool {
        self.forbidden.binary_search(&(arc as u32)).is_ok()
    }
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

#[derive(Default)]
struct Bucket {
    ids: Vec<u32>,
    exact: HashMap<u64, Vec<u32>>,
}

pub(super) struct Store {
    labels: Vec<Label>,
    nodes: Vec<BTreeMap<usize, Bucket>>,
}

impl Store {
    pub fn new(node_count: usize) -> Self {
        Self {
            labels: Vec::new(),
            nodes: (0..node_count).map(|_| BTreeMap::new()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, id: u32) -> &Label {
        &self.labels[id as usize]
    }

    pub fn label_mut(&mut self, id: u32) -> &mut Label {
        &mut self.labels[id as usize]
    }

    pub fn push(&mut self, label: Label) -> u32 {
        self.labels.push(label);
        (self.labels.len() - 1) as u32
    }

    pub fn insert_at_node(&mut self, id: u32) {
        let l = &self.labels[id as usize];
        let bucket = self.nodes[l.node].entry(l.forbidden.len()).or_default();
        bucket.ids.push(id);
        bucket.exact.entry(l.hash).or_default().push(id);
    }

    /// Arcs of the path, from the source.
    pub fn arcs(&self, mut id: u32) -> Vec<usize> {
        let mut out = Vec::new();
        while self.labels[id as usize].parent != NONE {
            out.push(self.labels[id as usize].arc as usize);
            id = self.labels[id as usize].parent;
        }
        out.reverse();
        out
    }

    /// Whether the path of `id` passes through `node`.
    pub fn visits(&self, mut id: u32, node: usize) -> bool {
        if self.labels[id as usize].visit_sig & (1 << (node % 128)) == 0 {
            return false;
        }
        loop {
            let l = &self.labels[id as usize];
            if l.node == node {
                return true;
            }
            if l.parent == NONE {
                return false;
            }
            id = l.parent;
        }
    }

    /// Whether some partial path listed at the candidate's node dominates it.
    pub fn dominated(&mut self, cand: &Label) -> bool {
        let labels = &self.labels;
        let size = cand.forbidden.len();
        for (&s, bucket) in self.nodes[cand.node].range_mut(..=size) {
            if s == size {
                if let Some(ids) = bucket.exact.get_mut(&cand.hash) {
                    ids.retain(|&i| labels[i as usize].alive);
                    if ids.iter().any(|&i| {
                        let l = &labels[i as usize];
                        l.length <= cand.length && l.forbidden == cand.forbidden
                    }) {
                        return true;
                    }
                }
            } else {
                bucket.ids.retain(|&i| labels[i as usize].alive);
                if bucket.ids.iter().any(|&i| {
                    let l = &labels[i as usize];
                    l.length <= cand.length
                        && l.sig & !cand.sig == 0
                        && is_subset(&l.forbidden, &cand.forbidden)
                }) {
                    return true;
                }
            }
        }
        false
    }

    /// Deletes penciled partial paths at the node of `id` that it dominates.
    pub fn prune_dominated_by(&mut self, id: u32) {
        let p = self.labels[id as usize].clone();
        let size = p.forbidden.len();
        let mut doomed = Vec::new();
        for (&s, bucket) in self.nodes[p.node].range(size..) {
            let candidates: &[u32] = if s == size {
                bucket.exact.get(&p.hash).map_or(&[], |v| v)
            } else {
                &bucket.ids
            };
            for &i in candidates {
                let l = &self.labels[i as usize];
                if i != id
                    && l.alive
                    && l.state == PathState::Penciled
                    && p.length <= l.length
                    && p.sig & !l.sig == 0
                    && is_subset(&p.forbidden, &l.forbidden)
                {
                    doomed.push(i);
                }
            }
        }
        for i in doomed {
            self.labels[i as usize].alive = false;
        }
    }
}
