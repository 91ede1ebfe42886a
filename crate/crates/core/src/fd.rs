//! Finite-difference operators on node fields.
//!
//! Every operator falls back to the two-point one-sided difference toward the
//! interior when a stencil point would leave the closed grid.

use crate::grid::{GridSpec, NodeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// A node field paired with the spacing needed to differentiate it.
#[derive(Debug, Clone, Copy)]
pub struct StencilField<'a> {
    values: &'a NodeField,
    h: f64,
    inv_h: f64,
    inv_2h: f64,
    n: usize,
}

impl<'a> StencilField<'a> {
    pub fn new(values: &'a NodeField, grid: &GridSpec) -> Self {
        assert_eq!(
            values.nodes_per_side(),
            grid.nodes_per_side(),
            "field does not match grid"
        );
        let h = grid.spacing();
        StencilField {
            values,
            h,
            inv_h: 1.0 / h,
            inv_2h: 0.5 / h,
            n: grid.intervals(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Value at offset `d` from `(i, j)` along `axis`; caller guarantees it exists.
    #[inline]
    fn shifted(&self, axis: Axis, i: usize, j: usize, d: isize) -> f64 {
        match axis {
            Axis::X1 => self.at((i as isize + d) as usize, j),
            Axis::X2 => self.at(i, (j as isize + d) as usize),
        }
    }

    #[inline]
    fn position(&self, axis: Axis, i: usize, j: usize) -> usize {
        match axis {
            Axis::X1 => i,
            Axis::X2 => j,
        }
    }

    #[inline]
    fn backward(&self, axis: Axis, i: usize, j: usize) -> f64 {
        (self.at(i, j) - self.shifted(axis, i, j, -1)) * self.inv_h
    }

    #[inline]
    fn forward(&self, axis: Axis, i: usize, j: usize) -> f64 {
        (self.shifted(axis, i, j, 1) - self.at(i, j)) * self.inv_h
    }
}

/// Central difference, one-sided at the boundary.
#[inline]
pub fn central_diff(f: &StencilField<'_>, axis: Axis, i: usize, j: usize) -> f64 {
    let p = f.position(axis, i, j);
    if p == 0 {
        f.forward(axis, i, j)
    } else if p == f.n {
        f.backward(axis, i, j)
    } else {
        (f.shifted(axis, i, j, 1) - f.shifted(axis, i, j, -1)) * f.inv_2h
    }
}

/// First-order donor-cell difference with respect to the sign of `velocity`.
/// A zero velocity gives the central difference.
#[inline]
pub fn upwind_diff(f: &StencilField<'_>, velocity: f64, axis: Axis, i: usize, j: usize) -> f64 {
    let p = f.position(axis, i, j);
    if velocity > 0.0 {
        if p > 0 {
            f.backward(axis, i, j)
        } else {
            f.forward(axis, i, j)
        }
    } else if velocity < 0.0 {
        if p < f.n {
            f.forward(axis, i, j)
        } else {
            f.backward(axis, i, j)
        }
    } else {
        central_diff(f, axis, i, j)
    }
}

/// Symmetric 2x2 tensor stored as `[[a11, a12], [a21, a22]]`.
pub type Sym2 = [[f64; 2]; 2];

#[inline]
fn symmetrize(grad: [[f64; 2]; 2]) -> Sym2 {
    let off = 0.5 * (grad[0][1] + grad[1][0]);
    [[grad[0][0], off], [off, grad[1][1]]]
}

/// Squared Frobenius norm.
#[inline]
pub fn frobenius_sq(d: &Sym2) -> f64 {
    d[0][0] * d[0][0] + d[0][1] * d[0][1] + d[1][0] * d[1][0] + d[1][1] * d[1][1]
}

/// Strain rate `(grad u + grad u^T) / 2` from nodal central differences.
pub fn strain_rate_at_node(u1: &StencilField<'_>, u2: &StencilField<'_>, i: usize, j: usize) -> Sym2 {
    symmetrize([
        [central_diff(u1, Axis::X1, i, j), central_diff(u1, Axis::X2, i, j)],
        [central_diff(u2, Axis::X1, i, j), central_diff(u2, Axis::X2, i, j)],
    ])
}

/// Gradient of the bilinear interpolant of `f` on cell `(ci, cj)`, which spans
/// `[(ci-1)h, ci h] x [(cj-1)h, cj h]`, at local coordinates `(s, t)` in `[0, 1]^2`.
#[inline]
pub fn bilinear_gradient(f: &StencilField<'_>, ci: usize, cj: usize, s: f64, t: f64) -> [f64; 2] {
    let f00 = f.at(ci - 1, cj - 1);
    let f10 = f.at(ci, cj - 1);
    let f01 = f.at(ci - 1, cj);
    let f11 = f.at(ci, cj);
    [
        ((1.0 - t) * (f10 - f00) + t * (f11 - f01)) / f.h,
        ((1.0 - s) * (f01 - f00) + s * (f11 - f10)) / f.h,
    ]
}

/// Strain rate of the bilinear interpolant of `u` at `(s, t)` inside cell `(ci, cj)`.
pub fn strain_rate_bilinear(
    u1: &StencilField<'_>,
    u2: &StencilField<'_>,
    ci: usize,
    cj: usize,
    s: f64,
    t: f64,
) -> Sym2 {
    symmetrize([
        bilinear_gradient(u1, ci, cj, s, t),
        bilinear_gradient(u2, ci, cj, s, t),
    ])
}

/// Strain rate of the bilinear interpolant at the center of cell `(ci, cj)`, `1 <= ci, cj <= N`.
pub fn strain_rate_at_cell_center(
    u1: &StencilField<'_>,
    u2: &StencilField<'_>,
    ci: usize,
    cj: usize,
) -> Sym2 {
    strain_rate_bilinear(u1, u2, ci, cj, 0.5, 0.5)
}
