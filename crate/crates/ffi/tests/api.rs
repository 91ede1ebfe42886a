use std::ffi::{CStr, CString};
use std::ptr;

use swe_core::diagnostics::energy_record;
use swe_core::{init_state, RunConfig, Stepper};
use swe_ffi::*;

const SMALL: &str = "preset = energy-study-v\nN = 20\nT = 0.5\nsnapshot_steps = none\n";

struct Handle(*mut SweSimulation);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { swe_simulation_free(self.0) };
    }
}

fn open(text: &str) -> Handle {
    let c = CString::new(text).unwrap();
    let mut sim = ptr::null_mut();
    let st = unsafe { swe_simulation_new(c.as_ptr(), &mut sim) };
    assert_eq!(st, SweStatus::Ok, "{}", last_error());
    Handle(sim)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(swe_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn matches_core_stepper() {
    let sim = open(SMALL);
    let plan = RunConfig::parse(SMALL).unwrap().plan().unwrap();
    let mut state = init_state(&plan.grid, &plan.params, &plan.layout, &plan.initial).unwrap();
    let mut stepper = Stepper::new(plan.grid, plan.params, plan.layout.clone(), plan.time.dt, plan.time.scheme);
    for _ in 0..7 {
        stepper.advance(&mut state).unwrap();
    }
    unsafe {
        assert_eq!(swe_simulation_advance(sim.0, 7), SweStatus::Ok);
        assert_eq!(swe_simulation_step(sim.0), 7);
        assert_eq!(swe_simulation_nodes_per_side(sim.0), 21);

        let mut eta = vec![0.0; 21 * 21];
        let st = swe_simulation_copy_field(sim.0, SweField::Eta, eta.as_mut_ptr(), eta.len());
        assert_eq!(st, SweStatus::Ok);
        assert_eq!(eta, state.eta.as_slice());

        let mut rec = SweEnergyRecord::default();
        assert_eq!(swe_simulation_energy(sim.0, &mut rec), SweStatus::Ok);
        let expect = energy_record(&state, &plan.grid, &plan.params, plan.time.time_of(7));
        assert_eq!(rec.energy, expect.energy);
        assert_eq!(rec.i2, expect.i2);
        assert_eq!(rec.sum, expect.sum);
        assert!((swe_simulation_time(sim.0) - 7.0 * plan.time.dt).abs() < 1e-15);
    }
}

#[test]
fn run_to_end_reaches_final_step() {
    let sim = open(SMALL);
    unsafe {
        let total = swe_simulation_total_steps(sim.0);
        assert!(total > 0);
        assert_eq!(swe_simulation_run_to_end(sim.0), SweStatus::Ok);
        assert_eq!(swe_simulation_step(sim.0), total);
        assert_eq!(swe_simulation_run_to_end(sim.0), SweStatus::Ok);
        assert_eq!(swe_simulation_step(sim.0), total);
    }
}

#[test]
fn short_buffer_is_rejected() {
    let sim = open(SMALL);
    let mut buf = vec![0.0; 10];
    let st = unsafe { swe_simulation_copy_field(sim.0, SweField::Phi, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, SweStatus::InvalidArgument);
    assert!(last_error().contains("441"));
}

#[test]
fn theorem_check_and_norm() {
    let sim = open(SMALL);
    unsafe {
        swe_simulation_advance(sim.0, 5);
        let mut rep = SweTheorem2Report::default();
        assert_eq!(swe_simulation_check_theorem2(sim.0, 0.01, 0.0, &mut rep), SweStatus::Ok);
        assert!(rep.c0_ok && rep.eta_floor_ok && rep.phi_positive_ok);
        assert!(rep.i12_sum <= 0.0);
        assert!((rep.c0_bound - 14.0007).abs() < 1e-3);
        assert_eq!(
            swe_simulation_check_theorem2(sim.0, 1.5, 0.0, &mut rep),
            SweStatus::InvalidArgument
        );

        let mut s = 0.0;
        assert_eq!(swe_simulation_s_norm(sim.0, &mut s), SweStatus::Ok);
        assert!(s > 0.0 && s < 1e-3);
    }
}

#[test]
fn solver_failure_is_sticky() {
    let sim = open("preset = energy-study-v\nN = 10\ndt = 5\nc1 = 0.09\nT = 1000\n");
    unsafe {
        assert_eq!(swe_simulation_run_to_end(sim.0), SweStatus::RuntimeError);
        let msg = last_error();
        assert!(!msg.is_empty());
        let step = swe_simulation_step(sim.0);
        assert_eq!(swe_simulation_advance(sim.0, 1), SweStatus::RuntimeError);
        assert_eq!(last_error(), msg);
        assert_eq!(swe_simulation_step(sim.0), step);
    }
}

#[test]
fn success_clears_error() {
    let c = CString::new("bogus_key = 1\n").unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { swe_simulation_new(c.as_ptr(), &mut sim) }, SweStatus::ConfigError);
    assert!(last_error().contains("bogus_key"));
    let _ok = open(SMALL);
    assert_eq!(last_error(), "");
}
