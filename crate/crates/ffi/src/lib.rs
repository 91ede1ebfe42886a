//! C ABI for the shallow-water solver.
//!
//! A simulation is an opaque [`SweSimulation`] created from configuration
//! text in the flat `key = value` format accepted by the `swe` binary. Every
//! fallible call returns a [`SweStatus`]; on failure the message is available
//! from [`swe_last_error_message`] on the same thread.
//!
//! ```c
//! SweSimulation *sim = NULL;
//! if (swe_simulation_new("preset = energy-study-v\nN = 50\n", &sim) != SWE_OK) {
//!     fprintf(stderr, "%s\n", swe_last_error_message());
//! }
//! swe_simulation_advance(sim, 100);
//! SweEnergyRecord rec;
//! swe_simulation_energy(sim, &rec);
//! swe_simulation_free(sim);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use swe_core::diagnostics::{energy_record, theorem2_check};
use swe_core::experiments::s_norm;
use swe_core::{init_state, Error, RunConfig, RunPlan, State, Stepper};

/// Result of every fallible call. Values 0 to 3 match the `swe` exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweStatus {
    Ok = 0,
    ConfigError = 1,
    RuntimeError = 2,
    TheoremViolated = 3,
    NullPointer = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Nodal field selector for [`swe_simulation_copy_field`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweField {
    Eta = 0,
    Phi = 1,
    U1 = 2,
    U2 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweEnergyRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub sum: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweTheorem2Report {
    pub step: usize,
    pub alpha: f64,
    pub c0_bound: f64,
    pub eta_floor_ok: bool,
    pub phi_positive_ok: bool,
    pub c0_ok: bool,
    pub i12_sum: f64,
    pub i2_transmission: f64,
    pub conclusion_holds: bool,
}

/// Opaque simulation handle.
pub struct SweSimulation {
    plan: RunPlan,
    stepper: Stepper,
    state: State,
    failed: Option<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: SweStatus, msg: impl Into<String>) -> SweStatus {
    set_last_error(msg);
    status
}

fn status_of(err: &Error) -> SweStatus {
    match err {
        Error::Config(_) | Error::Usage(_) => SweStatus::ConfigError,
        Error::Solver(_) | Error::Io(_) => SweStatus::RuntimeError,
    }
}

fn guard(body: impl FnOnce() -> SweStatus) -> SweStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == SweStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(_) => fail(SweStatus::Panic, "internal panic"),
    }
}

unsafe fn sim_ref<'a>(sim: *const SweSimulation) -> Result<&'a SweSimulation, SweStatus> {
    sim.as_ref()
        .ok_or_else(|| fail(SweStatus::NullPointer, "simulation handle is null"))
}

unsafe fn sim_mut<'a>(sim: *mut SweSimulation) -> Result<&'a mut SweSimulation, SweStatus> {
    sim.as_mut()
        .ok_or_else(|| fail(SweStatus::NullPointer, "simulation handle is null"))
}

fn build(text: &str) -> Result<SweSimulation, Error> {
    let plan = RunConfig::parse(text)?.plan()?;
    let state = init_state(&plan.grid, &plan.params, &plan.layout, &plan.initial)?;
    let stepper = Stepper::new(
        plan.grid,
        plan.params,
        plan.layout.clone(),
        plan.time.dt,
        plan.time.scheme,
    );
    Ok(SweSimulation {
        plan,
        stepper,
        state,
        failed: None,
    })
}

/// Create a simulation at its initial state from configuration text.
///
/// # Safety
/// `config` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_new(
    config: *const c_char,
    out: *mut *mut SweSimulation,
) -> SweStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(SweStatus::NullPointer, "config and out must be non-null");
        }
        *out = std::ptr::null_mut();
        let text = match CStr::from_ptr(config).to_str() {
            Ok(t) => t,
            Err(_) => return fail(SweStatus::InvalidArgument, "config is not valid UTF-8"),
        };
        match build(text) {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(sim));
                SweStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Release a simulation. Null is ignored.
///
/// # Safety
/// `sim` must come from [`swe_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_free(sim: *mut SweSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advance by `steps` time steps. After a solver failure every later call
/// returns `RuntimeError`.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_advance(sim: *mut SweSimulation, steps: usize) -> SweStatus {
    guard(|| {
        let sim = match sim_mut(sim) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if let Some(msg) = &sim.failed {
            return fail(SweStatus::RuntimeError, msg.clone());
        }
        for _ in 0..steps {
            if let Err(e) = sim.stepper.advance(&mut sim.state) {
                let msg = e.to_string();
                sim.failed = Some(msg.clone());
                return fail(SweStatus::RuntimeError, msg);
            }
        }
        SweStatus::Ok
    })
}

/// Advance to the configured final step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_run_to_end(sim: *mut SweSimulation) -> SweStatus {
    let remaining = match sim_ref(sim) {
        Ok(s) => s.plan.time.steps.saturating_sub(s.state.step),
        Err(st) => return st,
    };
    swe_simulation_advance(sim, remaining)
}

/// Current time index, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_step(sim: *const SweSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.state.step)
}

/// Configured number of steps, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_total_steps(sim: *const SweSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.plan.time.steps)
}

/// Current simulated time, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_time(sim: *const SweSimulation) -> f64 {
    sim.as_ref().map_or(0.0, |s| s.plan.time.time_of(s.state.step))
}

/// Nodes per side, `N + 1`; fields hold its square. 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_nodes_per_side(sim: *const SweSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.plan.grid.nodes_per_side())
}

/// Energy and boundary/dissipation integrals at the current step.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_energy(
    sim: *const SweSimulation,
    out: *mut SweEnergyRecord,
) -> SweStatus {
    guard(|| {
        let sim = match sim_ref(sim) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let Some(out) = out.as_mut() else {
            return fail(SweStatus::NullPointer, "out is null");
        };
        let p = &sim.plan;
        let r = energy_record(&sim.state, &p.grid, &p.params, p.time.time_of(sim.state.step));
        *out = SweEnergyRecord {
            step: r.step,
            time: r.time,
            energy: r.energy,
            i1: r.i1,
            i2: r.i2,
            i3: r.i3,
            i4: r.i4,
            sum: r.sum,
        };
        SweStatus::Ok
    })
}

/// Copy one nodal field into `buf`, row by row with `i` fastest.
/// `len` must be at least the square of [`swe_simulation_nodes_per_side`].
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_copy_field(
    sim: *const SweSimulation,
    field: SweField,
    buf: *mut f64,
    len: usize,
) -> SweStatus {
    guard(|| {
        let sim = match sim_ref(sim) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if buf.is_null() {
            return fail(SweStatus::NullPointer, "buf is null");
        }
        let src = match field {
            SweField::Eta => sim.state.eta.as_slice(),
            SweField::Phi => sim.state.phi.as_slice(),
            SweField::U1 => sim.state.u1.as_slice(),
            SweField::U2 => sim.state.u2.as_slice(),
        };
        if len < src.len() {
            return fail(
                SweStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", src.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, src.len()).copy_from_slice(src);
        SweStatus::Ok
    })
}

/// Evaluate the transmission-boundary sign estimate at the current step.
/// Returns `TheoremViolated` when its conditions hold but the flux sum
/// exceeds `tolerance`; `out` is filled in either case.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_check_theorem2(
    sim: *const SweSimulation,
    alpha: f64,
    tolerance: f64,
    out: *mut SweTheorem2Report,
) -> SweStatus {
    guard(|| {
        let sim = match sim_ref(sim) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let Some(out) = out.as_mut() else {
            return fail(SweStatus::NullPointer, "out is null");
        };
        let p = &sim.plan;
        let r = match theorem2_check(&sim.state, &p.grid, &p.layout, &p.params, alpha) {
            Ok(r) => r,
            Err(e) => return fail(SweStatus::InvalidArgument, e.to_string()),
        };
        *out = SweTheorem2Report {
            step: r.step,
            alpha: r.alpha,
            c0_bound: r.c0_bound,
            eta_floor_ok: r.eta_floor_ok,
            phi_positive_ok: r.phi_positive_ok,
            c0_ok: r.c0_ok,
            i12_sum: r.i12_sum,
            i2_transmission: r.i2_transmission,
            conclusion_holds: r.conclusion_holds,
        };
        if r.holds_within(tolerance) {
            SweStatus::Ok
        } else {
            fail(
                SweStatus::TheoremViolated,
                format!("flux sum {:e} exceeds {tolerance:e} at step {}", r.i12_sum, r.step),
            )
        }
    })
}

/// Elevation norm `h * sqrt(sum eta^2)` over all nodes.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swe_simulation_s_norm(sim: *const SweSimulation, out: *mut f64) -> SweStatus {
    guard(|| {
        let sim = match sim_ref(sim) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let Some(out) = out.as_mut() else {
            return fail(SweStatus::NullPointer, "out is null");
        };
        *out = s_norm(&sim.state, &sim.plan.grid);
        SweStatus::Ok
    })
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn swe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn swe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
