use crate::error::ConfigError;

/// Still-water depth below the reference height.
///
/// Only constant depth is used by the shipped experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bathymetry {
    Constant(f64),
}

impl Bathymetry {
    #[inline]
    pub fn depth_at(&self, _x1: f64, _x2: f64) -> f64 {
        match *self {
            Bathymetry::Constant(a) => a,
        }
    }
}

/// Physical constants in km-kg-s units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub rho: f64,
    pub mu: f64,
    pub g: f64,
    pub depth: Bathymetry,
    /// Transmission constant; the boundary wave speed is `c0 * sqrt(g * depth)`.
    pub c0: f64,
}

impl PhysicalParams {
    pub const RHO: f64 = 1e12;
    pub const MU: f64 = 1e3;
    pub const G: f64 = 9.8e-3;

    /// Standard density, viscosity and gravity with the given depth and `c0`.
    pub fn standard(depth: f64, c0: f64) -> Result<Self, ConfigError> {
        Self::new(Self::RHO, Self::MU, Self::G, depth, c0)
    }

    pub fn new(rho: f64, mu: f64, g: f64, depth: f64, c0: f64) -> Result<Self, ConfigError> {
        for (key, v) in [("rho", rho), ("mu", mu), ("g", g), ("a", depth), ("c0", c0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(key, format!("must be positive, got {v}")));
            }
        }
        Ok(PhysicalParams {
            rho,
            mu,
            g,
            depth: Bathymetry::Constant(depth),
            c0,
        })
    }

    /// Constant depth `a`.
    pub fn mean_depth(&self) -> f64 {
        match self.depth {
            Bathymetry::Constant(a) => a,
        }
    }

    #[inline]
    pub fn wave_speed_at(&self, x1: f64, x2: f64) -> f64 {
        self.c0 * (self.g * self.depth.depth_at(x1, x2)).sqrt()
    }
}
