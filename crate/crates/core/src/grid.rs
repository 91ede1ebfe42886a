//! Uniform node grid on the square `[0, L]^2` and node-indexed scalar fields.

use std::ops::{Index, IndexMut};

use crate::error::ConfigError;

/// Square-domain discretization with `N` intervals per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    side_length: f64,
    intervals: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(side_length: f64, intervals: usize) -> Result<Self, ConfigError> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(ConfigError::invalid("L", "side length must be positive"));
        }
        if intervals < 2 {
            return Err(ConfigError::invalid("N", "need at least 2 intervals per side"));
        }
        Ok(GridSpec {
            side_length,
            intervals,
            spacing: side_length / intervals as f64,
        })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// `N`: number of intervals per side; node indices run over `0..=N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Nodes per side, `N + 1`.
    pub fn nodes_per_side(&self) -> usize {
        self.intervals + 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_side() * self.nodes_per_side()
    }

    /// Flat index of node `(i, j)`; `i` (the x1 index) varies fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.intervals + 1) + i
    }

    #[inline]
    pub fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.spacing, j as f64 * self.spacing)
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.intervals || j == self.intervals
    }

    /// Interior node set, `0 < i, j < N`.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.intervals;
        (1..n).flat_map(move |j| (1..n).map(move |i| (i, j)))
    }

    /// All nodes of the closed grid in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> {
        let m = self.nodes_per_side();
        (0..m).flat_map(move |j| (0..m).map(move |i| (i, j)))
    }

    /// Boundary nodes, counter-clockwise from the origin: bottom, right, top, left.
    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let n = self.intervals;
        let mut out = Vec::with_capacity(4 * n);
        out.extend((0..n).map(|i| (i, 0)));
        out.extend((0..n).map(|j| (n, j)));
        out.extend((1..=n).rev().map(|i| (i, n)));
        out.extend((1..=n).rev().map(|j| (0, j)));
        out
    }
}

/// Scalar values at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeField {
    side: usize,
    values: Vec<f64>,
}

impl NodeField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self::filled(grid, 0.0)
    }

    pub fn filled(grid: &GridSpec, value: f64) -> Self {
        NodeField {
            side: grid.nodes_per_side(),
            values: vec![value; grid.node_count()],
        }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for (i, j) in grid.nodes() {
            let (x1, x2) = grid.coord(i, j);
            field[(i, j)] = f(x1, x2);
        }
        field
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Option<Self> {
        (values.len() == grid.node_count()).then_some(NodeField {
            side: grid.nodes_per_side(),
            values,
        })
    }

    pub fn nodes_per_side(&self) -> usize {
        self.side
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// First non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p % self.side, p / self.side))
    }
}

impl Index<(usize, usize)> for NodeField {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[j * self.side + i]
    }
}

impl IndexMut<(usize, usize)> for NodeField {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.values[j * self.side + i]
    }
}
