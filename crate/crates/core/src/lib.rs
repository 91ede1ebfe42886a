//! Finite-difference solver for the 2D viscous shallow-water equations on a
//! square, with wall (Dirichlet) and transmission boundary conditions, plus
//! discrete energy diagnostics and a calibration sweep for the transmission
//! constant.

pub mod boundary;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod fd;
pub mod grid;
pub mod io;
pub mod params;
pub mod solver;
pub mod state;

pub use boundary::{BoundaryCase, BoundaryLayout, NodeKind};
pub use config::RunConfig;
pub use diagnostics::{EnergyRecord, Theorem2Report};
pub use error::{ConfigError, Error, SolverError, UsageError};
pub use grid::{GridSpec, NodeField};
pub use params::PhysicalParams;
pub use solver::{advance, run, RunObserver, RunPlan, Stepper, TimeScheme, TimeStepping};
pub use state::{init_state, InitialCase, InitialCondition, State};
