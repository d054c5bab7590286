//! The six 12-node benchmark topologies.

use std::fmt;
use std::str::FromStr;

use super::{Graph, GraphError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topology {
    Cycle12Plus3,
    Grid3x4,
    Tietze,
    MurakamiKim,
    Icosahedron,
    K66,
}

pub const TOPOLOGY_NAMES: [&str; 6] = [
    "cycle12plus3",
    "grid3x4",
    "tietze",
    "murakami_kim",
    "icosahedron",
    "k66",
];

impl Topology {
    pub const ALL: [Topology; 6] = [
        Topology::Cycle12Plus3,
        Topology::Grid3x4,
        Topology::Tietze,
        Topology::MurakamiKim,
        Topology::Icosahedron,
        Topology::K66,
    ];

    pub fn name(self) -> &'static str {
        TOPOLOGY_NAMES[self as usize]
    }

    /// Built-in fixture text; `None` for Murakami & Kim, which is data-file only.
    pub fn fixture(self) -> Option<&'static str> {
        match self {
            Topology::Cycle12Plus3 => Some(include_str!("../../fixtures/cycle12plus3.graph")),
            Topology::Grid3x4 => Some(include_str!("../../fixtures/grid3x4.graph")),
            Topology::Tietze => Some(include_str!("../../fixtures/tietze.graph")),
            Topology::MurakamiKim => None,
            Topology::Icosahedron => Some(include_str!("../../fixtures/icosahedron.graph")),
            Topology::K66 => Some(include_str!("../../fixtures/k66.graph")),
        }
    }

    pub fn link_count(self) -> usize {
        match self {
            Topology::Cycle12Plus3 => 15,
            Topology::Grid3x4 => 17,
            Topology::Tietze => 18,
            Topology::MurakamiKim => 24,
            Topology::Icosahedron => 30,
            Topology::K66 => 36,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TOPOLOGY_NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| Topology::ALL[i])
            .ok_or_else(|| GraphError::UnknownTopology(s.to_string()))
    }
}

/// Loads a named topology. `data` supplies the graph text for topologies
/// without a built-in fixture (Murakami & Kim); it overrides nothing else.
///
/// The Murakami & Kim file is expected to have 12 nodes and 24 links with an
/// all-pairs hop-distance sum of 120; this is checked by the test suite, not
/// enforced here.
pub fn standard_topology(name: &str, data: Option<&str>) -> Result<Graph, GraphError> {
    let topo: Topology = name.parse()?;
    match (topo.fixture(), data) {
        (Some(text), _) => Graph::parse(text),
        (None, Some(text)) => Graph::parse(text),
        (None, None) => Err(GraphError::MissingTopologyData(name.to_string())),
    }
}

/// The three "large" nodes used for unbalanced traffic on each fixture.
///
/// Each set reproduces the reference working bandwidth for unbalanced traffic
/// (2/8/14 copies for small/small, small/large, large/large pairs). Murakami &
/// Kim has no fixture, so callers search for a set on the supplied graph.
pub fn default_large_nodes(topo: Topology) -> Option<[&'static str; 3]> {
    match topo {
        // One endpoint of each chord.
        Topology::Cycle12Plus3 => Some(["v00", "v04", "v08"]),
        // Middle row, first three columns.
        Topology::Grid3x4 => Some(["r1c0", "r1c1", "r1c2"]),
        // The three Petersen nodes adjacent to the inserted triangle.
        Topology::Tietze => Some(["v03", "v06", "v07"]),
        Topology::MurakamiKim => None,
        // A triangle.
        Topology::Icosahedron => Some(["v00", "v01", "v08"]),
        // Three nodes on one side.
        Topology::K66 => Some(["a0", "a1", "a2"]),
    }
}
