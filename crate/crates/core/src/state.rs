//! Discrete fields at one time level and Gaussian-bump initial data.

use std::fmt;
use std::str::FromStr;

use crate::boundary::BoundaryLayout;
use crate::error::{ConfigError, SolverError};
use crate::grid::{GridSpec, NodeField};
use crate::params::PhysicalParams;
use crate::solver::apply_boundary_conditions;

/// Nodal unknowns at time level `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub step: usize,
    /// Total height, `eta + depth`.
    pub phi: NodeField,
    pub u1: NodeField,
    pub u2: NodeField,
    /// Surface elevation.
    pub eta: NodeField,
}

impl State {
    /// Still water at rest.
    pub fn rest(grid: &GridSpec, params: &PhysicalParams) -> Self {
        State {
            step: 0,
            phi: NodeField::filled(grid, params.mean_depth()),
            u1: NodeField::zeros(grid),
            u2: NodeField::zeros(grid),
            eta: NodeField::zeros(grid),
        }
    }

    /// Reports the first non-finite entry across all fields.
    pub fn check_finite(&self) -> Result<(), SolverError> {
        for (name, f) in [
            ("phi", &self.phi),
            ("u1", &self.u1),
            ("u2", &self.u2),
            ("eta", &self.eta),
        ] {
            if let Some((i, j)) = f.first_non_finite() {
                return Err(SolverError::BlowUp {
                    step: self.step,
                    field: name,
                    i,
                    j,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn velocity(&self, i: usize, j: usize) -> [f64; 2] {
        [self.u1[(i, j)], self.u2[(i, j)]]
    }
}

/// Gaussian surface bump `amplitude * exp(-width * |x - center|^2)` with a uniform
/// initial velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
    pub velocity: [f64; 2],
}

impl InitialCondition {
    #[inline]
    pub fn elevation_at(&self, x1: f64, x2: f64) -> f64 {
        let d1 = x1 - self.center[0];
        let d2 = x2 - self.center[1];
        self.amplitude * (-self.width * (d1 * d1 + d2 * d2)).exp()
    }
}

/// Initial-data families used for the transmission-constant calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitialCase {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl InitialCase {
    pub const ALL: [InitialCase; 6] = [
        InitialCase::I,
        InitialCase::II,
        InitialCase::III,
        InitialCase::IV,
        InitialCase::V,
        InitialCase::VI,
    ];

    /// The initial condition on the unit square with amplitude `1e-3`.
    pub fn condition(self) -> InitialCondition {
        let mid = [0.5, 0.5];
        let (center, width, velocity) = match self {
            InitialCase::I => (mid, 100.0, [0.0, 0.0]),
            InitialCase::II => (mid, 200.0, [0.0, 0.0]),
            InitialCase::III => ([0.0, 0.5], 100.0, [0.0, 0.0]),
            InitialCase::IV => ([0.0, 0.0], 100.0, [0.0, 0.0]),
            InitialCase::V => (mid, 100.0, [1e-4, 1e-4]),
            InitialCase::VI => (mid, 100.0, [1e-4, -1e-4]),
        };
        InitialCondition {
            amplitude: 1e-3,
            center,
            width,
            velocity,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InitialCase::I => "I",
            InitialCase::II => "II",
            InitialCase::III => "III",
            InitialCase::IV => "IV",
            InitialCase::V => "V",
            InitialCase::VI => "VI",
        }
    }
}

impl fmt::Display for InitialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitialCase {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(InitialCase::I),
            "II" | "2" => Ok(InitialCase::II),
            "III" | "3" => Ok(InitialCase::III),
            "IV" | "4" => Ok(InitialCase::IV),
            "V" | "5" => Ok(InitialCase::V),
            "VI" | "6" => Ok(InitialCase::VI),
            other => Err(ConfigError::invalid(
                "sweep_cases",
                format!("expected one of I..VI, got `{other}`"),
            )),
        }
    }
}

/// Nodewise initial data. Dirichlet boundary nodes take the prescribed wall
/// velocity and transmission nodes the boundary relation evaluated on the
/// initial height.
pub fn init_state(
    grid: &GridSpec,
    params: &PhysicalParams,
    layout: &BoundaryLayout,
    ic: &InitialCondition,
) -> Result<State, SolverError> {
    let eta = NodeField::from_fn(grid, |x1, x2| ic.elevation_at(x1, x2));
    let phi = NodeField::from_fn(grid, |x1, x2| {
        ic.elevation_at(x1, x2) + params.depth.depth_at(x1, x2)
    });
    let mut state = State {
        step: 0,
        phi,
        u1: NodeField::filled(grid, ic.velocity[0]),
        u2: NodeField::filled(grid, ic.velocity[1]),
        eta,
    };
    let State { phi, u1, u2, .. } = &mut state;
    apply_boundary_conditions(grid, params, layout, phi, u1, u2, 0)?;
    state.check_finite()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryCase;

    #[test]
    fn flat_rest_state() {
        let g = GridSpec::new(1.0, 8).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let ic = InitialCondition {
            amplitude: 0.0,
            center: [0.5, 0.5],
            width: 100.0,
            velocity: [0.0, 0.0],
        };
        for case in BoundaryCase::ALL {
            let layout = BoundaryLayout::for_case(case, &g);
            let s = init_state(&g, &p, &layout, &ic).unwrap();
            assert_eq!(s, State::rest(&g, &p));
        }
    }

    #[test]
    fn gaussian_values_at_nodes() {
        let g = GridSpec::new(10.0, 100).unwrap();
        let p = PhysicalParams::standard(1.0, 0.9).unwrap();
        let ic = InitialCondition {
            amplitude: 0.01,
            center: [5.0, 5.0],
            width: 100.0,
            velocity: [0.0, 0.0],
        };
        let s = init_state(&g, &p, &BoundaryLayout::for_case(BoundaryCase::I, &g), &ic).unwrap();
        assert_eq!(s.eta[(50, 50)], 0.01);
        assert_eq!(s.eta[(0, 0)], 0.01 * (-5000.0f64).exp());
        for (i, j) in g.nodes() {
            assert!((s.phi[(i, j)] - s.eta[(i, j)] - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn case_ii_width() {
        let ic = InitialCase::II.condition();
        let v = ic.elevation_at(0.6, 0.5);
        assert!((v - 1e-3 * (-2.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn wall_and_transmission_velocity_at_start() {
        let g = GridSpec::new(1.0, 10).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let ic = InitialCase::V.condition();
        let layout = BoundaryLayout::for_case(BoundaryCase::II, &g);
        let s = init_state(&g, &p, &layout, &ic).unwrap();
        assert_eq!(s.velocity(5, 5), [1e-4, 1e-4]);
        assert_eq!(s.velocity(0, 5), [0.0, 0.0]);
        let top = s.velocity(5, 10);
        assert_eq!(top[0], 0.0);
        let phi = s.phi[(5, 10)];
        assert_eq!(top[1], p.wave_speed_at(0.5, 1.0) * (phi - 0.1) / phi);
        assert!(top[1] > 0.0);
    }

    #[test]
    fn parse_initial_case() {
        assert_eq!("iv".parse::<InitialCase>().unwrap(), InitialCase::IV);
        assert!("VII".parse::<InitialCase>().is_err());
    }
}
