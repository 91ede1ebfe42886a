//! Discrete energy, boundary energy-flux integrals, interior dissipation, and
//! checks of the energy identity and of the transmission-boundary sign estimate.
//!
//! Boundary integrands are products of the bilinear interpolants of the nodal
//! fields. On a boundary segment those interpolants are linear in arc length,
//! so three-point Gauss-Legendre quadrature integrates the kinetic-flux and
//! pressure-work terms exactly.

use crate::boundary::{BoundaryLayout, BoundaryNode, Edge};
use crate::error::UsageError;
use crate::fd::{strain_rate_bilinear, StencilField};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::state::State;

/// Energy and its rate decomposition at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    /// Kinetic-energy flux through the boundary.
    pub i1: f64,
    /// Pressure work on the boundary.
    pub i2: f64,
    /// Viscous work on the boundary.
    pub i3: f64,
    /// Interior viscous dissipation, never positive.
    pub i4: f64,
    pub sum: f64,
}

impl EnergyRecord {
    pub fn integrals(&self) -> [f64; 4] {
        [self.i1, self.i2, self.i3, self.i4]
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub const GAUSS3: [(f64, f64); 3] = {
    // sqrt(3/5) / 2
    const D: f64 = 0.387_298_334_620_741_7;
    [(0.5 - D, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + D, 5.0 / 18.0)]
};

/// Integral over `[0, length]` of `f(tau * length)` expressed in the unit parameter `tau`.
pub fn gauss3_segment(length: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    length * GAUSS3.iter().map(|&(t, w)| w * f(t)).sum::<f64>()
}

/// `(rho/2) h^2 sum phi |u|^2 + (rho g / 2) h^2 sum eta^2` over interior nodes.
pub fn compute_energy(state: &State, grid: &GridSpec, params: &PhysicalParams) -> f64 {
    let m = grid.nodes_per_side();
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for j in 1..m - 1 {
        let r = j * m + 1..(j + 1) * m - 1;
        let (phi, u1, u2, eta) = (
            &state.phi.as_slice()[r.clone()],
            &state.u1.as_slice()[r.clone()],
            &state.u2.as_slice()[r.clone()],
            &state.eta.as_slice()[r],
        );
        for i in 0..m - 2 {
            kinetic += phi[i] * (u1[i] * u1[i] + u2[i] * u2[i]);
            potential += eta[i] * eta[i];
        }
    }
    let h2 = grid.spacing() * grid.spacing();
    0.5 * params.rho * h2 * kinetic + 0.5 * params.rho * params.g * h2 * potential
}

/// One boundary segment between adjacent boundary nodes, with its adjacent cell.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub edge: Edge,
    /// Start and end node indices, ordered by increasing coordinate along the edge.
    pub start: (usize, usize),
    pub end: (usize, usize),
    /// Adjacent cell `(ci, cj)`, `1 <= ci, cj <= N`.
    pub cell: (usize, usize),
}

impl Segment {
    /// Local bilinear coordinates inside the adjacent cell at parameter `tau`.
    fn local(&self, tau: f64) -> (f64, f64) {
        match self.edge {
            Edge::Bottom => (tau, 0.0),
            Edge::Top => (tau, 1.0),
            Edge::Left => (0.0, tau),
            Edge::Right => (1.0, tau),
        }
    }
}

/// The `4N` boundary segments: bottom, right, top, left; `m = 1..=N` on each.
pub fn boundary_segments(grid: &GridSpec) -> impl Iterator<Item = Segment> {
    let n = grid.intervals();
    Edge::ALL.into_iter().flat_map(move |edge| {
        (1..=n).map(move |m| match edge {
            Edge::Bottom => Segment {
                edge,
                start: (m - 1, 0),
                end: (m, 0),
                cell: (m, 1),
            },
            Edge::Top => Segment {
                edge,
                start: (m - 1, n),
                end: (m, n),
                cell: (m, n),
            },
            Edge::Left => Segment {
                edge,
                start: (0, m - 1),
                end: (0, m),
                cell: (1, m),
            },
            Edge::Right => Segment {
                edge,
                start: (n, m - 1),
                end: (n, m),
                cell: (n, m),
            },
        })
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryIntegrals {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Flux integrals over one segment.
pub fn segment_integrals(
    state: &State,
    grid: &GridSpec,
    params: &PhysicalParams,
    seg: &Segment,
) -> BoundaryIntegrals {
    let (s, e) = (seg.start, seg.end);
    let n = seg.edge.normal();
    let u1f = StencilField::new(&state.u1, grid);
    let u2f = StencilField::new(&state.u2, grid);
    let mut acc = BoundaryIntegrals::default();
    for &(tau, w) in &GAUSS3 {
        let phi = lerp(state.phi[s], state.phi[e], tau);
        let eta = lerp(state.eta[s], state.eta[e], tau);
        let u = [
            lerp(state.u1[s], state.u1[e], tau),
            lerp(state.u2[s], state.u2[e], tau),
        ];
        let un = u[0] * n[0] + u[1] * n[1];
        let speed2 = u[0] * u[0] + u[1] * u[1];
        let (ls, lt) = seg.local(tau);
        let d = strain_rate_bilinear(&u1f, &u2f, seg.cell.0, seg.cell.1, ls, lt);
        let dn = [d[0][0] * n[0] + d[0][1] * n[1], d[1][0] * n[0] + d[1][1] * n[1]];
        acc.i1 += w * phi * speed2 * un;
        acc.i2 += w * phi * eta * un;
        acc.i3 += w * phi * (dn[0] * u[0] + dn[1] * u[1]);
    }
    let h = grid.spacing();
    BoundaryIntegrals {
        i1: -0.5 * params.rho * h * acc.i1,
        i2: -params.rho * params.g * h * acc.i2,
        i3: 2.0 * params.mu * h * acc.i3,
    }
}

/// Flux integrals over the segments accepted by `include`.
pub fn boundary_integrals_where(
    state: &State,
    grid: &GridSpec,
    params: &PhysicalParams,
    mut include: impl FnMut(&Segment) -> bool,
) -> BoundaryIntegrals {
    let mut total = BoundaryIntegrals::default();
    for seg in boundary_segments(grid).filter(|s| include(s)) {
        let part = segment_integrals(state, grid, params, &seg);
        total.i1 += part.i1;
        total.i2 += part.i2;
        total.i3 += part.i3;
    }
    total
}

/// Flux integrals over the whole boundary.
pub fn boundary_integrals(state: &State, grid: &GridSpec, params: &PhysicalParams) -> BoundaryIntegrals {
    boundary_integrals_where(state, grid, params, |_| true)
}

/// `-2 mu h^2 sum_cells phi(center) |D(u)(center)|^2`.
pub fn dissipation_integral(state: &State, grid: &GridSpec, params: &PhysicalParams) -> f64 {
    let m = grid.nodes_per_side();
    let inv_h = 1.0 / grid.spacing();
    let (phi, u1, u2) = (state.phi.as_slice(), state.u1.as_slice(), state.u2.as_slice());
    let mut sum = 0.0;
    for cj in 1..m {
        let lo = (cj - 1) * m..cj * m;
        let hi = cj * m..(cj + 1) * m;
        let (p0, p1) = (&phi[lo.clone()], &phi[hi.clone()]);
        let (a0, a1) = (&u1[lo.clone()], &u1[hi.clone()]);
        let (b0, b1) = (&u2[lo], &u2[hi]);
        for i in 1..m {
            let p = 0.25 * (p0[i - 1] + p0[i] + p1[i - 1] + p1[i]);
            let d11 = 0.5 * ((a0[i] - a0[i - 1]) + (a1[i] - a1[i - 1])) * inv_h;
            let g12 = 0.5 * ((a1[i - 1] - a0[i - 1]) + (a1[i] - a0[i])) * inv_h;
            let g21 = 0.5 * ((b0[i] - b0[i - 1]) + (b1[i] - b1[i - 1])) * inv_h;
            let d22 = 0.5 * ((b1[i - 1] - b0[i - 1]) + (b1[i] - b0[i])) * inv_h;
            let d12 = 0.5 * (g12 + g21);
            sum += p * (d11 * d11 + 2.0 * d12 * d12 + d22 * d22);
        }
    }
    -2.0 * params.mu * grid.spacing() * grid.spacing() * sum
}

pub fn energy_record(state: &State, grid: &GridSpec, params: &PhysicalParams, time: f64) -> EnergyRecord {
    let b = boundary_integrals(state, grid, params);
    let i4 = dissipation_integral(state, grid, params);
    EnergyRecord {
        step: state.step,
        time,
        energy: compute_energy(state, grid, params),
        i1: b.i1,
        i2: b.i2,
        i3: b.i3,
        i4,
        sum: b.i1 + b.i2 + b.i3 + i4,
    }
}

/// `(E^{k+1} - E^k) / dt - sum_I^k` for consecutive records.
pub fn energy_identity_residual(records: &[EnergyRecord], dt: f64) -> Result<Vec<f64>, UsageError> {
    if records.len() < 2 {
        return Err(UsageError(format!(
            "energy residual needs at least 2 records, got {}",
            records.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(UsageError("energy residual needs dt > 0".into()));
    }
    records
        .windows(2)
        .map(|w| {
            if w[1].step != w[0].step + 1 {
                return Err(UsageError(format!(
                    "energy residual needs records at consecutive steps, found {} then {}",
                    w[0].step, w[1].step
                )));
            }
            Ok((w[1].energy - w[0].energy) / dt - w[0].sum)
        })
        .collect()
}

/// Upper bound on `c0` for a given `alpha`: `sqrt(2 / alpha) * (1 - alpha)`.
pub fn c0_bound(alpha: f64) -> f64 {
    (2.0 / alpha).sqrt() * (1.0 - alpha)
}

/// Evaluation of the transmission-boundary sign estimate at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Report {
    pub step: usize,
    pub alpha: f64,
    pub c0_bound: f64,
    /// `eta >= -alpha * depth` on the closed transmission boundary.
    pub eta_floor_ok: bool,
    /// `phi > 0` on the closed transmission boundary.
    pub phi_positive_ok: bool,
    pub c0_ok: bool,
    /// Kinetic-flux plus pressure-work integrals over the transmission boundary.
    pub i12_sum: f64,
    /// Pressure-work integral over the transmission boundary.
    pub i2_transmission: f64,
    /// `i12_sum <= 0` whenever all three conditions hold.
    pub conclusion_holds: bool,
}

impl Theorem2Report {
    pub fn conditions_hold(&self) -> bool {
        self.eta_floor_ok && self.phi_positive_ok && self.c0_ok
    }

    /// Implication check with an absolute allowance for quadrature round-off.
    pub fn holds_within(&self, tolerance: f64) -> bool {
        !self.conditions_hold() || self.i12_sum <= tolerance
    }
}

pub fn theorem2_check(
    state: &State,
    grid: &GridSpec,
    layout: &BoundaryLayout,
    params: &PhysicalParams,
    alpha: f64,
) -> Result<Theorem2Report, UsageError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(UsageError(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let bound = c0_bound(alpha);
    let node_at = |ij: (usize, usize)| -> &BoundaryNode {
        layout
            .node(grid, ij.0, ij.1)
            .expect("segment endpoints are boundary nodes")
    };

    let mut eta_floor_ok = true;
    let mut phi_positive_ok = true;
    let mut check_node = |ij: (usize, usize)| {
        let (x1, x2) = grid.coord(ij.0, ij.1);
        let depth = params.depth.depth_at(x1, x2);
        eta_floor_ok &= state.eta[ij] >= -alpha * depth;
        phi_positive_ok &= state.phi[ij] > 0.0;
    };
    let on_transmission =
        |seg: &Segment| layout.segment_is_transmission(node_at(seg.start), node_at(seg.end));
    for seg in boundary_segments(grid).filter(on_transmission) {
        check_node(seg.start);
        check_node(seg.end);
    }
    let b = boundary_integrals_where(state, grid, params, on_transmission);
    let c0_ok = params.c0 > 0.0 && params.c0 <= bound;
    let i12_sum = b.i1 + b.i2;
    let conditions = eta_floor_ok && phi_positive_ok && c0_ok;
    Ok(Theorem2Report {
        step: state.step,
        alpha,
        c0_bound: bound,
        eta_floor_ok,
        phi_positive_ok,
        c0_ok,
        i12_sum,
        i2_transmission: b.i2,
        conclusion_holds: !conditions || i12_sum <= 0.0,
    })
}

/// Maximum and minimum of one integral over a record series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub max: f64,
    pub min: f64,
}

/// Componentwise extrema of `I_h1..I_h4`, optionally skipping the initial level.
pub fn extrema_table(records: &[EnergyRecord], exclude_initial: bool) -> Result<[Extrema; 4], UsageError> {
    let mut it = records
        .iter()
        .filter(|r| !(exclude_initial && r.step == 0))
        .peekable();
    if it.peek().is_none() {
        return Err(UsageError("extrema of an empty record series".into()));
    }
    let mut out = [Extrema {
        max: f64::NEG_INFINITY,
        min: f64::INFINITY,
    }; 4];
    for r in it {
        for (e, v) in out.iter_mut().zip(r.integrals()) {
            e.max = e.max.max(v);
            e.min = e.min.min(v);
        }
    }
    Ok(out)
}
