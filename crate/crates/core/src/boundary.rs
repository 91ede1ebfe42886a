//! Boundary node classification (Dirichlet wall or transmission) and outward normals.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::grid::GridSpec;

/// The five transmission-boundary arrangements studied for the square domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryCase {
    /// No transmission boundary.
    I,
    /// Top edge.
    II,
    /// Top and right edges plus the corner `(L, L)`.
    III,
    /// Top, right and left edges plus corners `(L, L)` and `(0, L)`.
    IV,
    /// Entire boundary.
    V,
}

impl BoundaryCase {
    pub const ALL: [BoundaryCase; 5] = [
        BoundaryCase::I,
        BoundaryCase::II,
        BoundaryCase::III,
        BoundaryCase::IV,
        BoundaryCase::V,
    ];

    /// Number of edges carrying the transmission condition.
    pub fn transmission_edges(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundaryCase::I => "i",
            BoundaryCase::II => "ii",
            BoundaryCase::III => "iii",
            BoundaryCase::IV => "iv",
            BoundaryCase::V => "v",
        }
    }
}

impl fmt::Display for BoundaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BoundaryCase {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(BoundaryCase::I),
            "ii" | "2" => Ok(BoundaryCase::II),
            "iii" | "3" => Ok(BoundaryCase::III),
            "iv" | "4" => Ok(BoundaryCase::IV),
            "v" | "5" => Ok(BoundaryCase::V),
            other => Err(ConfigError::invalid(
                "boundary",
                format!("expected one of i, ii, iii, iv, v; got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left];

    pub fn normal(self) -> [f64; 2] {
        match self {
            Edge::Bottom => [0.0, -1.0],
            Edge::Right => [1.0, 0.0],
            Edge::Top => [0.0, 1.0],
            Edge::Left => [-1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Dirichlet,
    Transmission,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub i: usize,
    pub j: usize,
    pub kind: NodeKind,
    /// Outward unit normal; at corners the normalized sum of the two edge normals.
    pub normal: [f64; 2],
}

impl BoundaryNode {
    /// True for the four domain corners.
    pub fn is_corner(&self, n: usize) -> bool {
        (self.i == 0 || self.i == n) && (self.j == 0 || self.j == n)
    }
}

/// Classification of every boundary node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLayout {
    intervals: usize,
    nodes: Vec<BoundaryNode>,
    /// Position in `nodes` by flat grid index, for boundary nodes only.
    lookup: Vec<Option<u32>>,
    /// Velocity prescribed on Dirichlet nodes.
    pub dirichlet_velocity: [f64; 2],
}

fn edges_of(i: usize, j: usize, n: usize) -> Vec<Edge> {
    let mut e = Vec::with_capacity(2);
    if j == 0 {
        e.push(Edge::Bottom);
    }
    if i == n {
        e.push(Edge::Right);
    }
    if j == n {
        e.push(Edge::Top);
    }
    if i == 0 {
        e.push(Edge::Left);
    }
    e
}

pub fn outward_normal(i: usize, j: usize, n: usize) -> [f64; 2] {
    let edges = edges_of(i, j, n);
    let mut v = [0.0, 0.0];
    for e in &edges {
        let en = e.normal();
        v[0] += en[0];
        v[1] += en[1];
    }
    if edges.len() == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[0] *= s;
        v[1] *= s;
    }
    v
}

impl BoundaryLayout {
    /// Build a layout from an arbitrary classification rule over boundary nodes.
    pub fn from_fn(grid: &GridSpec, mut classify: impl FnMut(usize, usize) -> NodeKind) -> Self {
        let n = grid.intervals();
        let mut lookup = vec![None; grid.node_count()];
        let nodes: Vec<BoundaryNode> = grid
            .boundary_nodes()
            .into_iter()
            .enumerate()
            .map(|(pos, (i, j))| {
                lookup[grid.index(i, j)] = Some(pos as u32);
                BoundaryNode {
                    i,
                    j,
                    kind: classify(i, j),
                    normal: outward_normal(i, j, n),
                }
            })
            .collect();
        BoundaryLayout {
            intervals: n,
            nodes,
            lookup,
            dirichlet_velocity: [0.0, 0.0],
        }
    }

    pub fn for_case(case: BoundaryCase, grid: &GridSpec) -> Self {
        let n = grid.intervals();
        Self::from_fn(grid, |i, j| {
            let top = j == n && i > 0 && i < n;
            let right = i == n && j > 0 && j < n;
            let left = i == 0 && j > 0 && j < n;
            let top_right = i == n && j == n;
            let top_left = i == 0 && j == n;
            let transmission = match case {
                BoundaryCase::I => false,
                BoundaryCase::II => top,
                BoundaryCase::III => top || right || top_right,
                BoundaryCase::IV => top || right || left || top_right || top_left,
                BoundaryCase::V => true,
            };
            if transmission {
                NodeKind::Transmission
            } else {
                NodeKind::Dirichlet
            }
        })
    }

    pub fn with_dirichlet_velocity(mut self, u: [f64; 2]) -> Self {
        self.dirichlet_velocity = u;
        self
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn node(&self, grid: &GridSpec, i: usize, j: usize) -> Option<&BoundaryNode> {
        self.lookup
            .get(grid.index(i, j))
            .copied()
            .flatten()
            .map(|p| &self.nodes[p as usize])
    }

    pub fn kind_at(&self, grid: &GridSpec, i: usize, j: usize) -> Option<NodeKind> {
        self.node(grid, i, j).map(|b| b.kind)
    }

    pub fn transmission_nodes(&self) -> impl Iterator<Item = &BoundaryNode> {
        self.nodes.iter().filter(|b| b.kind == NodeKind::Transmission)
    }

    pub fn dirichlet_nodes(&self) -> impl Iterator<Item = &BoundaryNode> {
        self.nodes.iter().filter(|b| b.kind == NodeKind::Dirichlet)
    }

    /// Whether the open boundary segment between two adjacent boundary nodes lies
    /// on the transmission boundary. Corner endpoints do not decide membership:
    /// a segment belongs to the transmission part when its edge-interior
    /// endpoints are transmission nodes.
    pub fn segment_is_transmission(&self, a: &BoundaryNode, b: &BoundaryNode) -> bool {
        let n = self.intervals;
        let deciding: Vec<&BoundaryNode> =
            [a, b].into_iter().filter(|p| !p.is_corner(n)).collect();
        if deciding.is_empty() {
            a.kind == NodeKind::Transmission && b.kind == NodeKind::Transmission
        } else {
            deciding.iter().all(|p| p.kind == NodeKind::Transmission)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(1.0, n).unwrap()
    }

    #[test]
    fn case_i_all_dirichlet() {
        let l = BoundaryLayout::for_case(BoundaryCase::I, &grid(4));
        assert_eq!(l.nodes().len(), 16);
        assert_eq!(l.transmission_nodes().count(), 0);
    }

    #[test]
    fn case_v_all_transmission() {
        let l = BoundaryLayout::for_case(BoundaryCase::V, &grid(4));
        assert_eq!(l.transmission_nodes().count(), 16);
    }

    #[test]
    fn case_iii_exact_set() {
        let g = grid(4);
        let l = BoundaryLayout::for_case(BoundaryCase::III, &g);
        let mut t: Vec<(usize, usize)> = l.transmission_nodes().map(|b| (b.i, b.j)).collect();
        t.sort();
        let mut expected = vec![(1, 4), (2, 4), (3, 4), (4, 1), (4, 2), (4, 3), (4, 4)];
        expected.sort();
        assert_eq!(t, expected);
    }

    #[test]
    fn case_ii_and_iv_counts() {
        let g = grid(4);
        assert_eq!(
            BoundaryLayout::for_case(BoundaryCase::II, &g).transmission_nodes().count(),
            3
        );
        let iv = BoundaryLayout::for_case(BoundaryCase::IV, &g);
        assert_eq!(iv.transmission_nodes().count(), 11);
        assert_eq!(iv.kind_at(&g, 0, 4), Some(NodeKind::Transmission));
        assert_eq!(iv.kind_at(&g, 0, 0), Some(NodeKind::Dirichlet));
        assert_eq!(iv.kind_at(&g, 4, 0), Some(NodeKind::Dirichlet));
    }

    #[test]
    fn partition_and_complement() {
        for n in [2, 3, 7] {
            let g = grid(n);
            for case in BoundaryCase::ALL {
                let l = BoundaryLayout::for_case(case, &g);
                assert_eq!(
                    l.transmission_nodes().count() + l.dirichlet_nodes().count(),
                    4 * n
                );
            }
            let i = BoundaryLayout::for_case(BoundaryCase::I, &g);
            let v = BoundaryLayout::for_case(BoundaryCase::V, &g);
            for (a, b) in i.nodes().iter().zip(v.nodes()) {
                assert_ne!(a.kind, b.kind);
            }
        }
    }

    #[test]
    fn normals_are_unit_and_outward() {
        let g = grid(5);
        let l = BoundaryLayout::for_case(BoundaryCase::V, &g);
        for b in l.nodes() {
            let len = (b.normal[0].powi(2) + b.normal[1].powi(2)).sqrt();
            assert!((len - 1.0).abs() < 1e-15);
            let (x1, x2) = g.coord(b.i, b.j);
            // Points outward: away from the center.
            assert!((x1 - 0.5) * b.normal[0] + (x2 - 0.5) * b.normal[1] > 0.0);
        }
        let corner = l.node(&g, 5, 5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(corner.normal, [s, s]);
        assert_eq!(l.node(&g, 2, 5).unwrap().normal, [0.0, 1.0]);
        assert!(l.node(&g, 2, 2).is_none());
    }

    #[test]
    fn segment_membership_follows_edge_interior() {
        let g = grid(4);
        let l = BoundaryLayout::for_case(BoundaryCase::II, &g);
        let corner = *l.node(&g, 0, 4).unwrap();
        let next = *l.node(&g, 1, 4).unwrap();
        assert!(l.segment_is_transmission(&corner, &next));
        let left = *l.node(&g, 0, 3).unwrap();
        assert!(!l.segment_is_transmission(&left, &corner));
    }

    #[test]
    fn parse_case_labels() {
        assert_eq!("iii".parse::<BoundaryCase>().unwrap(), BoundaryCase::III);
        assert_eq!("V".parse::<BoundaryCase>().unwrap(), BoundaryCase::V);
        assert!("vi".parse::<BoundaryCase>().is_err());
    }
}
