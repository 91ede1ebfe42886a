//! Explicit time stepping of the discrete shallow-water system.
//!
//! One step advances the total height on every node with the level-`k`
//! velocity, then the velocity on interior nodes, then imposes the wall and
//! transmission conditions on the boundary using the new height. See
//! [`TimeScheme`] for the time level seen by the momentum update.

use crate::boundary::{BoundaryLayout, NodeKind};
use crate::error::{ConfigError, SolverError};
use crate::fd::{central_diff, strain_rate_at_node, upwind_diff, Axis, StencilField};
use crate::grid::{GridSpec, NodeField};
use crate::params::{Bathymetry, PhysicalParams};
use crate::state::{init_state, InitialCondition, State};
use std::fmt;
use std::str::FromStr;

/// Time level at which the momentum update sees the height field.
///
/// `ForwardEuler` evaluates every momentum term at level `k`. With centered
/// differences it amplifies the shortest resolved waves by roughly
/// `1 + (c dt / h)^2` per step, which becomes visible after about `10^4` steps
/// at `c dt / h = 0.06`. `ForwardBackward` evaluates the pressure, viscous
/// and `1 / phi` terms with the freshly computed `phi^{k+1}` and is stable
/// under the usual gravity-wave CFL limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScheme {
    #[default]
    ForwardBackward,
    ForwardEuler,
}

impl TimeScheme {
    pub fn label(self) -> &'static str {
        match self {
            TimeScheme::ForwardBackward => "forward-backward",
            TimeScheme::ForwardEuler => "forward-euler",
        }
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TimeScheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "forward-backward" => Ok(TimeScheme::ForwardBackward),
            "forward-euler" => Ok(TimeScheme::ForwardEuler),
            other => Err(ConfigError::invalid(
                "time_scheme",
                format!("expected forward-backward or forward-euler, got {other:?}"),
            )),
        }
    }
}

/// Step size and step count, `steps = floor(final_time / dt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepping {
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub scheme: TimeScheme,
}

impl TimeStepping {
    pub fn new(dt: f64, final_time: f64) -> Result<Self, ConfigError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ConfigError::invalid("dt", "time step must be positive"));
        }
        if !(final_time.is_finite() && final_time >= 0.0) {
            return Err(ConfigError::invalid("T", "final time must be non-negative"));
        }
        // Relative slack so that e.g. 100 / 0.005 counts 20000 steps.
        let steps = (final_time / dt * (1.0 + 1e-12)).floor() as usize;
        Ok(TimeStepping {
            dt,
            steps,
            final_time,
            scheme: TimeScheme::default(),
        })
    }

    pub fn with_scheme(self, scheme: TimeScheme) -> Self {
        TimeStepping { scheme, ..self }
    }

    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// Continuity update at one node through the generic (boundary-aware) operators.
#[inline]
fn continuity_node(
    phi: &StencilField<'_>,
    u1: &StencilField<'_>,
    u2: &StencilField<'_>,
    state: &State,
    dt: f64,
    i: usize,
    j: usize,
) -> f64 {
    let a = state.u1[(i, j)];
    let b = state.u2[(i, j)];
    let p = state.phi[(i, j)];
    let div = central_diff(u1, Axis::X1, i, j) + central_diff(u2, Axis::X2, i, j);
    let adv = a * upwind_diff(phi, a, Axis::X1, i, j) + b * upwind_diff(phi, b, Axis::X2, i, j);
    p - dt * (div * p + adv)
}

/// Donor-cell difference from the three values around a node; same arithmetic
/// as [`upwind_diff`] away from the boundary.
#[inline(always)]
fn upwind3(velocity: f64, minus: f64, center: f64, plus: f64, inv_h: f64, inv_2h: f64) -> f64 {
    if velocity > 0.0 {
        (center - minus) * inv_h
    } else if velocity < 0.0 {
        (plus - center) * inv_h
    } else {
        (plus - minus) * inv_2h
    }
}

/// Rows `j - 1`, `j`, `j + 1` of a row-major field with `m` nodes per row.
#[inline(always)]
pub(crate) fn row_triple(f: &[f64], j: usize, m: usize) -> (&[f64], &[f64], &[f64]) {
    (
        &f[(j - 1) * m..j * m],
        &f[j * m..(j + 1) * m],
        &f[(j + 1) * m..(j + 2) * m],
    )
}

fn first_non_finite(field: &NodeField, step: usize, name: &'static str) -> Result<(), SolverError> {
    match field.first_non_finite() {
        Some((i, j)) => Err(SolverError::BlowUp {
            step,
            field: name,
            i,
            j,
        }),
        None => Ok(()),
    }
}

/// Continuity update on the closed grid, written into `phi_new`.
pub fn continuity_into(
    state: &State,
    grid: &GridSpec,
    dt: f64,
    phi_new: &mut NodeField,
) -> Result<(), SolverError> {
    let phi_f = StencilField::new(&state.phi, grid);
    let u1_f = StencilField::new(&state.u1, grid);
    let u2_f = StencilField::new(&state.u2, grid);
    for (i, j) in grid.boundary_nodes() {
        phi_new[(i, j)] = continuity_node(&phi_f, &u1_f, &u2_f, state, dt, i, j);
    }

    let m = grid.nodes_per_side();
    let inv_h = 1.0 / grid.spacing();
    let inv_2h = 0.5 / grid.spacing();
    let phi = state.phi.as_slice();
    let u1 = state.u1.as_slice();
    let u2 = state.u2.as_slice();
    let out = phi_new.as_mut_slice();
    let mut finite = true;
    for j in 1..m - 1 {
        let (p_dn, p_c, p_up) = row_triple(phi, j, m);
        let (_, a_c, _) = row_triple(u1, j, m);
        let (b_dn, b_c, b_up) = row_triple(u2, j, m);
        let o = &mut out[j * m..(j + 1) * m];
        for i in 1..m - 1 {
            let a = a_c[i];
            let b = b_c[i];
            let p = p_c[i];
            let div = (a_c[i + 1] - a_c[i - 1]) * inv_2h + (b_up[i] - b_dn[i]) * inv_2h;
            let adv = a * upwind3(a, p_c[i - 1], p, p_c[i + 1], inv_h, inv_2h)
                + b * upwind3(b, p_dn[i], p, p_up[i], inv_h, inv_2h);
            let next = p - dt * (div * p + adv);
            finite &= next.is_finite();
            o[i] = next;
        }
    }
    if finite {
        finite = grid
            .boundary_nodes()
            .into_iter()
            .all(|(i, j)| phi_new[(i, j)].is_finite());
    }
    if finite {
        Ok(())
    } else {
        first_non_finite(phi_new, state.step + 1, "phi")
    }
}

/// Height at level `k + 1` from the mass balance with upwinded advection.
pub fn step_continuity(state: &State, grid: &GridSpec, dt: f64) -> Result<NodeField, SolverError> {
    let mut out = NodeField::zeros(grid);
    continuity_into(state, grid, dt, &mut out)?;
    Ok(out)
}

/// Nodewise viscous flux tensor `phi * D(u)`, stored as its three distinct entries.
#[derive(Debug)]
struct StressField {
    t11: NodeField,
    t12: NodeField,
    t22: NodeField,
}

impl StressField {
    fn new(grid: &GridSpec) -> Self {
        StressField {
            t11: NodeField::zeros(grid),
            t12: NodeField::zeros(grid),
            t22: NodeField::zeros(grid),
        }
    }

    fn fill(&mut self, state: &State, grid: &GridSpec) {
        let u1_f = StencilField::new(&state.u1, grid);
        let u2_f = StencilField::new(&state.u2, grid);
        for (i, j) in grid.boundary_nodes() {
            let d = strain_rate_at_node(&u1_f, &u2_f, i, j);
            let p = state.phi[(i, j)];
            self.t11[(i, j)] = p * d[0][0];
            self.t12[(i, j)] = p * d[0][1];
            self.t22[(i, j)] = p * d[1][1];
        }

        let m = grid.nodes_per_side();
        let inv_2h = 0.5 / grid.spacing();
        let phi = state.phi.as_slice();
        let u1 = state.u1.as_slice();
        let u2 = state.u2.as_slice();
        let t11 = self.t11.as_mut_slice();
        let t12 = self.t12.as_mut_slice();
        let t22 = self.t22.as_mut_slice();
        for j in 1..m - 1 {
            let (a_dn, a_c, a_up) = row_triple(u1, j, m);
            let (b_dn, b_c, b_up) = row_triple(u2, j, m);
            let p_c = &phi[j * m..(j + 1) * m];
            let r = j * m..(j + 1) * m;
            let (o11, o12, o22) = (&mut t11[r.clone()], &mut t12[r.clone()], &mut t22[r]);
            for i in 1..m - 1 {
                let d11 = (a_c[i + 1] - a_c[i - 1]) * inv_2h;
                let d12 = 0.5 * ((a_up[i] - a_dn[i]) * inv_2h + (b_c[i + 1] - b_c[i - 1]) * inv_2h);
                let d22 = (b_up[i] - b_dn[i]) * inv_2h;
                let p = p_c[i];
                o11[i] = p * d11;
                o12[i] = p * d12;
                o22[i] = p * d22;
            }
        }
    }
}

fn momentum_into(
    state: &State,
    grid: &GridSpec,
    params: &PhysicalParams,
    dt: f64,
    stress: &mut StressField,
    u1_new: &mut NodeField,
    u2_new: &mut NodeField,
) -> Result<(), SolverError> {
    let m = grid.nodes_per_side();
    let phi = state.phi.as_slice();
    stress.fill(state, grid);
    let visc = 2.0 * params.mu / params.rho;
    let g = params.g;
    let inv_2h = 0.5 / grid.spacing();
    let u1 = state.u1.as_slice();
    let u2 = state.u2.as_slice();
    let eta = state.eta.as_slice();
    let t11 = stress.t11.as_slice();
    let t12 = stress.t12.as_slice();
    let t22 = stress.t22.as_slice();
    let o1 = u1_new.as_mut_slice();
    let o2 = u2_new.as_mut_slice();
    let mut wet = true;
    let mut finite = true;
    for j in 1..m - 1 {
        let (a_dn, a_c, a_up) = row_triple(u1, j, m);
        let (b_dn, b_c, b_up) = row_triple(u2, j, m);
        let (e_dn, e_c, e_up) = row_triple(eta, j, m);
        let (_, s11, _) = row_triple(t11, j, m);
        let (s12_dn, s12, s12_up) = row_triple(t12, j, m);
        let (s22_dn, _, s22_up) = row_triple(t22, j, m);
        let p_c = &phi[j * m..(j + 1) * m];
        let r = j * m..(j + 1) * m;
        let (w1, w2) = (&mut o1[r.clone()], &mut o2[r]);
        for i in 1..m - 1 {
            let a = a_c[i];
            let b = b_c[i];
            let p = p_c[i];
            wet &= p > 0.0;
            let adv1 = a * ((a_c[i + 1] - a_c[i - 1]) * inv_2h) + b * ((a_up[i] - a_dn[i]) * inv_2h);
            let adv2 = a * ((b_c[i + 1] - b_c[i - 1]) * inv_2h) + b * ((b_up[i] - b_dn[i]) * inv_2h);
            let div1 = (s11[i + 1] - s11[i - 1]) * inv_2h + (s12_up[i] - s12_dn[i]) * inv_2h;
            let div2 = (s12[i + 1] - s12[i - 1]) * inv_2h + (s22_up[i] - s22_dn[i]) * inv_2h;
            let coef = visc / p;
            let gx = (e_c[i + 1] - e_c[i - 1]) * inv_2h;
            let gy = (e_up[i] - e_dn[i]) * inv_2h;
            let n1 = a - dt * (adv1 + g * gx - coef * div1);
            let n2 = b - dt * (adv2 + g * gy - coef * div2);
            finite &= n1.is_finite() & n2.is_finite();
            w1[i] = n1;
            w2[i] = n2;
        }
    }
    if !wet {
        let (i, j) = grid
            .interior_nodes()
            .find(|&(i, j)| !(state.phi[(i, j)] > 0.0))
            .expect("a non-positive interior height was seen");
        return Err(SolverError::DryState {
            step: state.step,
            i,
            j,
            phi: state.phi[(i, j)],
        });
    }
    if !finite {
        first_non_finite(u1_new, state.step + 1, "u1")?;
        first_non_finite(u2_new, state.step + 1, "u2")?;
    }
    Ok(())
}

/// Velocity at level `k + 1` on interior nodes. Boundary entries are copied
/// from level `k` and must be completed by [`apply_boundary_conditions`].
pub fn step_momentum(
    state: &State,
    grid: &GridSpec,
    params: &PhysicalParams,
    dt: f64,
) -> Result<(NodeField, NodeField), SolverError> {
    let mut stress = StressField::new(grid);
    let mut u1 = state.u1.clone();
    let mut u2 = state.u2.clone();
    momentum_into(state, grid, params, dt, &mut stress, &mut u1, &mut u2)?;
    Ok((u1, u2))
}

/// Wall velocity on Dirichlet nodes, `c (phi - depth) / phi * n` on transmission nodes.
pub fn apply_boundary_conditions(
    grid: &GridSpec,
    params: &PhysicalParams,
    layout: &BoundaryLayout,
    phi: &NodeField,
    u1: &mut NodeField,
    u2: &mut NodeField,
    step: usize,
) -> Result<(), SolverError> {
    for node in layout.nodes() {
        let (i, j) = (node.i, node.j);
        let v = match node.kind {
            NodeKind::Dirichlet => layout.dirichlet_velocity,
            NodeKind::Transmission => {
                let p = phi[(i, j)];
                if p <= 0.0 || p.is_nan() {
                    return Err(SolverError::DryState { step, i, j, phi: p });
                }
                let (x1, x2) = grid.coord(i, j);
                let scale = params.wave_speed_at(x1, x2) * (p - params.depth.depth_at(x1, x2)) / p;
                [scale * node.normal[0], scale * node.normal[1]]
            }
        };
        u1[(i, j)] = v[0];
        u2[(i, j)] = v[1];
    }
    Ok(())
}

fn update_elevation(params: &PhysicalParams, phi: &NodeField, eta: &mut NodeField) {
    match params.depth {
        Bathymetry::Constant(a) => {
            for (e, p) in eta.as_mut_slice().iter_mut().zip(phi.as_slice()) {
                *e = p - a;
            }
        }
    }
}

/// One full step: continuity, momentum, boundary conditions, elevation.
pub fn advance(
    state: &State,
    grid: &GridSpec,
    params: &PhysicalParams,
    layout: &BoundaryLayout,
    dt: f64,
    scheme: TimeScheme,
) -> Result<State, SolverError> {
    let mut next = state.clone();
    Stepper::new(*grid, *params, layout.clone(), dt, scheme).advance(&mut next)?;
    Ok(next)
}

/// Reusable stepping context with preallocated level-`k+1` buffers.
#[derive(Debug)]
pub struct Stepper {
    grid: GridSpec,
    params: PhysicalParams,
    layout: BoundaryLayout,
    dt: f64,
    scheme: TimeScheme,
    phi: NodeField,
    u1: NodeField,
    u2: NodeField,
    stress: StressField,
}

impl Stepper {
    pub fn new(
        grid: GridSpec,
        params: PhysicalParams,
        layout: BoundaryLayout,
        dt: f64,
        scheme: TimeScheme,
    ) -> Self {
        Stepper {
            phi: NodeField::zeros(&grid),
            u1: NodeField::zeros(&grid),
            u2: NodeField::zeros(&grid),
            stress: StressField::new(&grid),
            grid,
            params,
            layout,
            dt,
            scheme,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn layout(&self) -> &BoundaryLayout {
        &self.layout
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> TimeScheme {
        self.scheme
    }

    /// Advance `state` in place by one step.
    ///
    /// Under [`TimeScheme::ForwardBackward`] a failed momentum update leaves
    /// `state` holding the new height with the old velocity.
    pub fn advance(&mut self, state: &mut State) -> Result<(), SolverError> {
        let next_step = state.step + 1;
        continuity_into(state, &self.grid, self.dt, &mut self.phi)?;
        if self.scheme == TimeScheme::ForwardBackward {
            std::mem::swap(&mut state.phi, &mut self.phi);
            update_elevation(&self.params, &state.phi, &mut state.eta);
        }
        momentum_into(
            state,
            &self.grid,
            &self.params,
            self.dt,
            &mut self.stress,
            &mut self.u1,
            &mut self.u2,
        )?;
        let phi_next = match self.scheme {
            TimeScheme::ForwardBackward => &state.phi,
            TimeScheme::ForwardEuler => &self.phi,
        };
        apply_boundary_conditions(
            &self.grid,
            &self.params,
            &self.layout,
            phi_next,
            &mut self.u1,
            &mut self.u2,
            next_step,
        )?;
        if self.scheme == TimeScheme::ForwardEuler {
            std::mem::swap(&mut state.phi, &mut self.phi);
            update_elevation(&self.params, &state.phi, &mut state.eta);
        }
        std::mem::swap(&mut state.u1, &mut self.u1);
        std::mem::swap(&mut state.u2, &mut self.u2);
        state.step = next_step;
        Ok(())
    }
}

/// Everything needed to execute one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub grid: GridSpec,
    pub params: PhysicalParams,
    pub layout: BoundaryLayout,
    pub initial: InitialCondition,
    pub time: TimeStepping,
    /// Energy diagnostics every this many steps; 0 disables them.
    pub energy_every: usize,
    pub snapshot_steps: Vec<usize>,
}

/// Read-only view of the run at one time level.
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub grid: &'a GridSpec,
    pub params: &'a PhysicalParams,
    pub layout: &'a BoundaryLayout,
    pub state: &'a State,
    pub time: f64,
    pub dt: f64,
}

/// Receives run output as it is produced. Returning an error aborts the run.
pub trait RunObserver {
    fn on_step(&mut self, _view: &StepView<'_>) -> Result<(), crate::Error> {
        Ok(())
    }

    fn on_record(
        &mut self,
        _record: &crate::diagnostics::EnergyRecord,
        _view: &StepView<'_>,
    ) -> Result<(), crate::Error> {
        Ok(())
    }

    fn on_snapshot(&mut self, _view: &StepView<'_>) -> Result<(), crate::Error> {
        Ok(())
    }
}

impl RunObserver for () {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_state: State,
}

/// Execute the plan, streaming states and records to `observer`.
///
/// On failure the observer has already received everything up to the last
/// completed step; the returned error carries the failing step.
pub fn run(plan: &RunPlan, observer: &mut dyn RunObserver) -> Result<RunSummary, crate::Error> {
    let RunPlan {
        grid,
        params,
        layout,
        initial,
        time,
        energy_every,
        snapshot_steps,
    } = plan;
    let mut state = init_state(grid, params, layout, initial)?;
    let mut stepper = Stepper::new(*grid, *params, layout.clone(), time.dt, time.scheme);
    let mut snapshots = snapshot_steps.clone();
    snapshots.sort_unstable();
    snapshots.dedup();
    let mut next_snapshot = snapshots.iter().peekable();

    for k in 0..=time.steps {
        if k > 0 {
            stepper.advance(&mut state)?;
        }
        let view = StepView {
            grid,
            params,
            layout,
            state: &state,
            time: time.time_of(k),
            dt: time.dt,
        };
        observer.on_step(&view)?;
        if *energy_every > 0 && k % energy_every == 0 {
            let record = crate::diagnostics::energy_record(&state, grid, params, view.time);
            observer.on_record(&record, &view)?;
        }
        while next_snapshot.peek().is_some_and(|&&s| s <= k) {
            if next_snapshot.next() == Some(&k) {
                observer.on_snapshot(&view)?;
            }
        }
    }
    Ok(RunSummary {
        steps: time.steps,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryCase;

    fn setup(n: usize, l: f64, a: f64) -> (GridSpec, PhysicalParams) {
        (
            GridSpec::new(l, n).unwrap(),
            PhysicalParams::standard(a, 0.9).unwrap(),
        )
    }

    #[test]
    fn step_counts() {
        assert_eq!(TimeStepping::new(0.005, 100.0).unwrap().steps, 20_000);
        assert_eq!(TimeStepping::new(0.05, 100.0).unwrap().steps, 2_000);
        assert_eq!(TimeStepping::new(2.0 / 500.0, 100.0).unwrap().steps, 25_000);
        assert_eq!(TimeStepping::new(1.0, 0.5).unwrap().steps, 0);
        assert_eq!(TimeStepping::new(0.3, 1.0).unwrap().steps, 3);
        assert!(TimeStepping::new(0.0, 1.0).is_err());
    }

    #[test]
    fn continuity_at_rest_is_identity() {
        let (g, p) = setup(6, 1.0, 0.1);
        let mut s = State::rest(&g, &p);
        s.phi = NodeField::from_fn(&g, |x1, x2| 0.1 + 0.01 * x1 * x2);
        let next = step_continuity(&s, &g, 0.01).unwrap();
        assert_eq!(next, s.phi);
    }

    #[test]
    fn continuity_divergence_free_linear_flow_on_flat_height() {
        let (g, p) = setup(6, 1.0, 0.1);
        let mut s = State::rest(&g, &p);
        s.u1 = NodeField::from_fn(&g, |_, x2| x2);
        s.u2 = NodeField::from_fn(&g, |x1, _| x1);
        let next = step_continuity(&s, &g, 0.01).unwrap();
        for (a, b) in next.as_slice().iter().zip(s.phi.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn continuity_hand_computed_center_node() {
        // 3x3 nodes on [0, 2]^2, h = 1.
        let g = GridSpec::new(2.0, 2).unwrap();
        let p = PhysicalParams::standard(1.0, 0.9).unwrap();
        let mut s = State::rest(&g, &p);
        let phi = [1.0, 1.1, 1.3, 0.9, 1.2, 1.6, 0.8, 1.0, 1.5];
        let u1 = [0.0, 0.1, 0.4, 0.2, 0.3, 0.5, 0.1, 0.2, 0.6];
        let u2 = [0.0, -0.1, 0.2, 0.1, -0.2, 0.0, 0.3, -0.4, 0.1];
        s.phi = NodeField::from_values(&g, phi.to_vec()).unwrap();
        s.u1 = NodeField::from_values(&g, u1.to_vec()).unwrap();
        s.u2 = NodeField::from_values(&g, u2.to_vec()).unwrap();
        let dt = 0.1;
        // Center (1,1): phi = 1.2, u = (0.3, -0.2).
        // div u = (0.5 - 0.2)/2 + (-0.4 - (-0.1))/2 = 0.15 - 0.15 = 0.
        // u1 > 0 -> backward: (1.2 - 0.9) = 0.3; u2 < 0 -> forward: (1.0 - 1.2) = -0.2.
        // adv = 0.3*0.3 + (-0.2)(-0.2) = 0.13.
        let expected = 1.2 - dt * (0.0 * 1.2 + 0.13);
        let next = step_continuity(&s, &g, dt).unwrap();
        assert!((next[(1, 1)] - expected).abs() < 1e-15);
    }

    #[test]
    fn interior_fast_path_matches_generic_operators() {
        let g = GridSpec::new(1.0, 9).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let mut s = State::rest(&g, &p);
        s.phi = NodeField::from_fn(&g, |x1, x2| 0.1 + 1e-3 * (5.0 * x1).cos() * x2);
        s.eta = NodeField::from_fn(&g, |x1, x2| 1e-3 * (5.0 * x1).cos() * x2);
        s.u1 = NodeField::from_fn(&g, |x1, x2| 1e-3 * (x1 - 0.5) * (3.0 * x2).sin());
        s.u2 = NodeField::from_fn(&g, |x1, x2| if x1 > x2 { 2e-4 } else { -1e-4 * x1 });
        let dt = 0.01;
        let phi_next = step_continuity(&s, &g, dt).unwrap();
        let (phi_f, u1_f, u2_f) = (
            StencilField::new(&s.phi, &g),
            StencilField::new(&s.u1, &g),
            StencilField::new(&s.u2, &g),
        );
        for (i, j) in g.nodes() {
            assert_eq!(phi_next[(i, j)], continuity_node(&phi_f, &u1_f, &u2_f, &s, dt, i, j));
        }

        let (u1_next, u2_next) = step_momentum(&s, &g, &p, dt).unwrap();
        let mut t = [NodeField::zeros(&g), NodeField::zeros(&g), NodeField::zeros(&g)];
        for (i, j) in g.nodes() {
            let d = strain_rate_at_node(&u1_f, &u2_f, i, j);
            t[0][(i, j)] = s.phi[(i, j)] * d[0][0];
            t[1][(i, j)] = s.phi[(i, j)] * d[0][1];
            t[2][(i, j)] = s.phi[(i, j)] * d[1][1];
        }
        let tf: Vec<StencilField<'_>> = t.iter().map(|f| StencilField::new(f, &g)).collect();
        let eta_f = StencilField::new(&s.eta, &g);
        for (i, j) in g.interior_nodes() {
            let (a, b) = (s.u1[(i, j)], s.u2[(i, j)]);
            let coef = 2.0 * p.mu / p.rho / s.phi[(i, j)];
            let adv1 = a * central_diff(&u1_f, Axis::X1, i, j) + b * central_diff(&u1_f, Axis::X2, i, j);
            let div1 = central_diff(&tf[0], Axis::X1, i, j) + central_diff(&tf[1], Axis::X2, i, j);
            let e1 = a - dt * (adv1 + p.g * central_diff(&eta_f, Axis::X1, i, j) - coef * div1);
            let adv2 = a * central_diff(&u2_f, Axis::X1, i, j) + b * central_diff(&u2_f, Axis::X2, i, j);
            let div2 = central_diff(&tf[1], Axis::X1, i, j) + central_diff(&tf[2], Axis::X2, i, j);
            let e2 = b - dt * (adv2 + p.g * central_diff(&eta_f, Axis::X2, i, j) - coef * div2);
            assert_eq!(u1_next[(i, j)], e1);
            assert_eq!(u2_next[(i, j)], e2);
        }
    }

    #[test]
    fn momentum_rest_and_rigid_motion() {
        let (g, p) = setup(8, 1.0, 0.1);
        let s = State::rest(&g, &p);
        let (u1, u2) = step_momentum(&s, &g, &p, 0.005).unwrap();
        assert!(u1.as_slice().iter().chain(u2.as_slice()).all(|&v| v == 0.0));

        let mut s = State::rest(&g, &p);
        s.u1 = NodeField::filled(&g, 0.02);
        let (u1, u2) = step_momentum(&s, &g, &p, 0.005).unwrap();
        assert_eq!(u1, s.u1);
        assert_eq!(u2, s.u2);
    }

    #[test]
    fn momentum_gravity_only() {
        let (g, p) = setup(8, 1.0, 0.1);
        let mut s = State::rest(&g, &p);
        let slope = 1e-3;
        s.eta = NodeField::from_fn(&g, |x1, _| slope * x1);
        s.phi = NodeField::from_fn(&g, |x1, _| 0.1 + slope * x1);
        let dt = 0.005;
        let (u1, u2) = step_momentum(&s, &g, &p, dt).unwrap();
        for (i, j) in g.interior_nodes() {
            assert!((u1[(i, j)] + dt * p.g * slope).abs() < 1e-18);
            assert_eq!(u2[(i, j)], 0.0);
        }
    }

    #[test]
    fn momentum_rejects_dry_interior() {
        let (g, p) = setup(4, 1.0, 0.1);
        let mut s = State::rest(&g, &p);
        s.phi[(2, 2)] = 0.0;
        assert!(matches!(
            step_momentum(&s, &g, &p, 0.01),
            Err(SolverError::DryState { i: 2, j: 2, .. })
        ));
    }

    #[test]
    fn transmission_velocity_values() {
        let (g, p) = setup(4, 1.0, 0.1);
        let layout = BoundaryLayout::for_case(BoundaryCase::III, &g);
        let mut phi = NodeField::filled(&g, 0.1);
        phi[(2, 4)] = 0.101;
        phi[(4, 4)] = 0.101;
        let mut u1 = NodeField::filled(&g, 7.0);
        let mut u2 = NodeField::filled(&g, 7.0);
        apply_boundary_conditions(&g, &p, &layout, &phi, &mut u1, &mut u2, 1).unwrap();
        let speed = 0.9 * (9.8e-4f64).sqrt() * (0.001 / 0.101);
        assert!((speed - 2.79e-4).abs() < 1e-6);
        assert_eq!(u1[(2, 4)], 0.0);
        assert!((u2[(2, 4)] - speed).abs() < 1e-17);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u1[(4, 4)] - speed * s).abs() < 1e-17);
        assert!((u2[(4, 4)] - speed * s).abs() < 1e-17);
        // eta = 0 gives no outflow; Dirichlet nodes get the wall velocity.
        assert_eq!(u2[(1, 4)], 0.0);
        assert_eq!((u1[(0, 0)], u2[(0, 0)]), (0.0, 0.0));
        // Interior untouched.
        assert_eq!(u1[(2, 2)], 7.0);
    }

    #[test]
    fn transmission_rejects_dry_boundary() {
        let (g, p) = setup(4, 1.0, 0.1);
        let layout = BoundaryLayout::for_case(BoundaryCase::II, &g);
        let mut phi = NodeField::filled(&g, 0.1);
        phi[(2, 4)] = -1e-3;
        let mut u1 = NodeField::zeros(&g);
        let mut u2 = NodeField::zeros(&g);
        let err = apply_boundary_conditions(&g, &p, &layout, &phi, &mut u1, &mut u2, 9).unwrap_err();
        assert_eq!(err.step(), 9);
        // The same height on a wall node is not an error.
        let layout = BoundaryLayout::for_case(BoundaryCase::I, &g);
        assert!(apply_boundary_conditions(&g, &p, &layout, &phi, &mut u1, &mut u2, 9).is_ok());
    }

    #[test]
    fn advance_is_composition_of_sub_steps() {
        let g = GridSpec::new(1.0, 4).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let layout = BoundaryLayout::for_case(BoundaryCase::V, &g);
        let ic = crate::state::InitialCase::I.condition();
        let s0 = init_state(&g, &p, &layout, &ic).unwrap();
        let dt = 0.01;
        let phi = step_continuity(&s0, &g, dt).unwrap();
        let (mut u1, mut u2) = step_momentum(&s0, &g, &p, dt).unwrap();
        apply_boundary_conditions(&g, &p, &layout, &phi, &mut u1, &mut u2, 1).unwrap();
        let s1 = advance(&s0, &g, &p, &layout, dt, TimeScheme::ForwardEuler).unwrap();
        assert_eq!(s1.step, 1);
        assert_eq!(s1.phi, phi);
        assert_eq!(s1.u1, u1);
        assert_eq!(s1.u2, u2);
        for (i, j) in g.nodes() {
            assert_eq!(s1.eta[(i, j)], phi[(i, j)] - 0.1);
        }
    }

    #[test]
    fn forward_backward_uses_new_height_in_momentum() {
        let g = GridSpec::new(1.0, 6).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let layout = BoundaryLayout::for_case(BoundaryCase::V, &g);
        let mut ic = crate::state::InitialCase::V.condition();
        ic.width = 10.0;
        let s0 = init_state(&g, &p, &layout, &ic).unwrap();
        let dt = 0.01;
        let phi = step_continuity(&s0, &g, dt).unwrap();
        let mut mid = s0.clone();
        mid.phi = phi.clone();
        for (i, j) in g.nodes() {
            mid.eta[(i, j)] = phi[(i, j)] - 0.1;
        }
        let (mut u1, mut u2) = step_momentum(&mid, &g, &p, dt).unwrap();
        apply_boundary_conditions(&g, &p, &layout, &phi, &mut u1, &mut u2, 1).unwrap();
        let fb = advance(&s0, &g, &p, &layout, dt, TimeScheme::ForwardBackward).unwrap();
        assert_eq!(fb.phi, phi);
        assert_eq!(fb.u1, u1);
        assert_eq!(fb.u2, u2);
        let fe = advance(&s0, &g, &p, &layout, dt, TimeScheme::ForwardEuler).unwrap();
        assert_eq!(fe.phi, fb.phi);
        assert_ne!(fe.u1, fb.u1);
    }

    #[test]
    fn time_scheme_parses_labels() {
        for s in [TimeScheme::ForwardBackward, TimeScheme::ForwardEuler] {
            assert_eq!(s.label().parse::<TimeScheme>().unwrap(), s);
        }
        assert!("rk4".parse::<TimeScheme>().is_err());
        assert_eq!(TimeStepping::new(0.1, 1.0).unwrap().scheme, TimeScheme::ForwardBackward);
    }

    #[test]
    fn advance_reports_nan() {
        let (g, p) = setup(4, 1.0, 0.1);
        let layout = BoundaryLayout::for_case(BoundaryCase::I, &g);
        let mut s = State::rest(&g, &p);
        s.step = 41;
        s.phi[(1, 3)] = f64::NAN;
        let err = advance(&s, &g, &p, &layout, 0.01, TimeScheme::ForwardEuler).unwrap_err();
        assert!(matches!(err, SolverError::BlowUp { step: 42, .. }));
    }

    #[test]
    fn rest_state_is_fixed_point() {
        let (g, p) = setup(6, 1.0, 0.1);
        for case in BoundaryCase::ALL {
            for scheme in [TimeScheme::ForwardBackward, TimeScheme::ForwardEuler] {
                let layout = BoundaryLayout::for_case(case, &g);
                let mut s = State::rest(&g, &p);
                let mut stepper = Stepper::new(g, p, layout, 0.37, scheme);
                for _ in 0..20 {
                    stepper.advance(&mut s).unwrap();
                }
                let rest = State { step: 20, ..State::rest(&g, &p) };
                assert_eq!(s, rest);
            }
        }
    }

    #[test]
    fn run_with_no_steps_emits_initial_record() {
        #[derive(Default)]
        struct Count(usize, usize);
        impl RunObserver for Count {
            fn on_record(
                &mut self,
                _: &crate::diagnostics::EnergyRecord,
                _: &StepView<'_>,
            ) -> Result<(), crate::Error> {
                self.0 += 1;
                Ok(())
            }
            fn on_snapshot(&mut self, _: &StepView<'_>) -> Result<(), crate::Error> {
                self.1 += 1;
                Ok(())
            }
        }
        let (g, p) = setup(4, 1.0, 0.1);
        let plan = RunPlan {
            grid: g,
            params: p,
            layout: BoundaryLayout::for_case(BoundaryCase::V, &g),
            initial: crate::state::InitialCase::I.condition(),
            time: TimeStepping::new(1.0, 0.5).unwrap(),
            energy_every: 1,
            snapshot_steps: vec![0],
        };
        let mut c = Count::default();
        let out = run(&plan, &mut c).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!((c.0, c.1), (1, 1));
    }
}
