//! Flat `key = value` run configuration.
//!
//! ```text
//! # energy study, three transmission edges
//! preset = energy-study-iii
//! N = 200
//! alpha = 0.01
//! ```
//!
//! A `preset` line is applied first regardless of its position; every other
//! key overrides one field. Keys: `preset L N dt T time_scheme rho mu g a c0 c1
//! width p u0 boundary u_d snapshot_steps energy_every alpha exclude_initial
//! sweep_c0 sweep_cases`. `dt` takes a number or a spacing multiple such as `2h`;
//! vector keys take `x,y`; `snapshot_steps` takes `quarters`, `none` or a list.

use std::fmt::Write as _;

use crate::boundary::{BoundaryCase, BoundaryLayout};
use crate::error::ConfigError;
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::solver::{RunPlan, TimeScheme, TimeStepping};
use crate::state::{InitialCase, InitialCondition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepRule {
    Fixed(f64),
    /// A multiple of the grid spacing, recomputed when `N` or `L` change.
    SpacingMultiple(f64),
}

impl TimeStepRule {
    pub fn resolve(&self, spacing: f64) -> f64 {
        match *self {
            TimeStepRule::Fixed(dt) => dt,
            TimeStepRule::SpacingMultiple(k) => k * spacing,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotRule {
    None,
    /// Steps `0, N_T/4, N_T/2, 3N_T/4, N_T`.
    Quarters,
    Steps(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub c0_values: Vec<f64>,
    pub cases: Vec<InitialCase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub side_length: f64,
    pub intervals: usize,
    pub dt: TimeStepRule,
    pub final_time: f64,
    pub scheme: TimeScheme,
    pub rho: f64,
    pub mu: f64,
    pub g: f64,
    pub depth: f64,
    pub c0: f64,
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 2],
    pub velocity: [f64; 2],
    pub boundary: BoundaryCase,
    pub dirichlet_velocity: [f64; 2],
    pub snapshots: SnapshotRule,
    /// Energy diagnostics every this many steps; 0 disables them.
    pub energy_every: usize,
    pub alpha: f64,
    /// Skip `k = 0` when tabulating extrema.
    pub exclude_initial: bool,
    pub sweep: Option<SweepSettings>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            side_length: 1.0,
            intervals: 400,
            dt: TimeStepRule::SpacingMultiple(2.0),
            final_time: 100.0,
            scheme: TimeScheme::ForwardBackward,
            rho: PhysicalParams::RHO,
            mu: PhysicalParams::MU,
            g: PhysicalParams::G,
            depth: 0.1,
            c0: 0.9,
            amplitude: 1e-3,
            width: 100.0,
            center: [0.5, 0.5],
            velocity: [0.0, 0.0],
            boundary: BoundaryCase::V,
            dirichlet_velocity: [0.0, 0.0],
            snapshots: SnapshotRule::Quarters,
            energy_every: 1,
            alpha: 0.01,
            exclude_initial: true,
            sweep: None,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("not a number: `{v}`")))?;
    if !x.is_finite() {
        return Err(ConfigError::invalid(key, "must be finite"));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("not a non-negative integer: `{v}`")))
}

fn parse_list<T>(
    key: &str,
    v: &str,
    item: impl Fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

fn parse_pair(key: &str, v: &str) -> Result<[f64; 2], ConfigError> {
    let xs = parse_list(key, v, parse_f64)?;
    <[f64; 2]>::try_from(xs).map_err(|_| ConfigError::invalid(key, "expected two comma-separated numbers"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::invalid(key, format!("expected true or false, got `{other}`"))),
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parse configuration text, expanding a `preset` line first.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno + 1,
                text: raw.to_string(),
            })?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }

        let mut cfg = match entries.iter().rev().find(|(k, _)| k == "preset") {
            Some((_, name)) => crate::experiments::preset(name)?,
            None => RunConfig::default(),
        };
        let mut explicit_c0 = false;
        let mut explicit_sweep_c0 = false;
        for (k, v) in entries.iter().filter(|(k, _)| k != "preset") {
            cfg.set(k, v)?;
            explicit_c0 |= k == "c0";
            explicit_sweep_c0 |= k == "sweep_c0";
        }
        if explicit_c0 && !explicit_sweep_c0 {
            if let Some(sweep) = cfg.sweep.as_mut() {
                sweep.c0_values = vec![cfg.c0];
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Override a single field by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "L" => self.side_length = parse_f64(key, value)?,
            "N" => {
                let n: i64 = value
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::invalid(key, format!("not an integer: `{value}`")))?;
                if n < 2 {
                    return Err(ConfigError::invalid(key, format!("need at least 2 intervals, got {n}")));
                }
                self.intervals = n as usize;
            }
            "dt" => {
                let v = value.trim();
                self.dt = match v.strip_suffix('h') {
                    Some(mult) => TimeStepRule::SpacingMultiple(if mult.trim().is_empty() {
                        1.0
                    } else {
                        parse_f64(key, mult)?
                    }),
                    None => TimeStepRule::Fixed(parse_f64(key, v)?),
                };
            }
            "T" => self.final_time = parse_f64(key, value)?,
            "time_scheme" => self.scheme = value.parse()?,
            "rho" => self.rho = parse_f64(key, value)?,
            "mu" => self.mu = parse_f64(key, value)?,
            "g" => self.g = parse_f64(key, value)?,
            "a" => self.depth = parse_f64(key, value)?,
            "c0" => self.c0 = parse_f64(key, value)?,
            "c1" => self.amplitude = parse_f64(key, value)?,
            "width" => self.width = parse_f64(key, value)?,
            "p" => self.center = parse_pair(key, value)?,
            "u0" => self.velocity = parse_pair(key, value)?,
            "boundary" => {
                self.boundary = value
                    .parse()
                    .map_err(|_| ConfigError::invalid(key, format!("expected i..v, got `{value}`")))?
            }
            "u_d" => self.dirichlet_velocity = parse_pair(key, value)?,
            "snapshot_steps" => {
                self.snapshots = match value.trim() {
                    "none" | "" => SnapshotRule::None,
                    "quarters" => SnapshotRule::Quarters,
                    list => SnapshotRule::Steps(parse_list(key, list, parse_usize)?),
                }
            }
            "energy_every" => self.energy_every = parse_usize(key, value)?,
            "alpha" => self.alpha = parse_f64(key, value)?,
            "exclude_initial" => self.exclude_initial = parse_bool(key, value)?,
            "sweep_c0" => {
                let c0_values = parse_list(key, value, parse_f64)?;
                match self.sweep.as_mut() {
                    Some(s) => s.c0_values = c0_values,
                    None => {
                        self.sweep = Some(SweepSettings {
                            c0_values,
                            cases: InitialCase::ALL.to_vec(),
                        })
                    }
                }
            }
            "sweep_cases" => {
                let cases = parse_list(key, value, |k, s| {
                    s.parse::<InitialCase>()
                        .map_err(|_| ConfigError::invalid(k, format!("expected I..VI, got `{s}`")))
                })?;
                match self.sweep.as_mut() {
                    Some(s) => s.cases = cases,
                    None => {
                        self.sweep = Some(SweepSettings {
                            c0_values: vec![self.c0],
                            cases,
                        })
                    }
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        self.params()?;
        let time = self.time()?;
        if !(self.width >= 0.0) {
            return Err(ConfigError::invalid("width", "must be non-negative"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::invalid("alpha", "must lie in (0, 1)"));
        }
        if let SnapshotRule::Steps(steps) = &self.snapshots {
            if let Some(&s) = steps.iter().find(|&&s| s > time.steps) {
                return Err(ConfigError::invalid(
                    "snapshot_steps",
                    format!("step {s} is beyond the last step {}", time.steps),
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.c0_values.is_empty() {
                return Err(ConfigError::invalid("sweep_c0", "empty list"));
            }
            if let Some(c) = sweep.c0_values.iter().find(|c| !(**c > 0.0)) {
                return Err(ConfigError::invalid("sweep_c0", format!("must be positive, got {c}")));
            }
            if sweep.cases.is_empty() {
                return Err(ConfigError::invalid("sweep_cases", "empty list"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.side_length, self.intervals)
    }

    pub fn params(&self) -> Result<PhysicalParams, ConfigError> {
        PhysicalParams::new(self.rho, self.mu, self.g, self.depth, self.c0)
    }

    pub fn time(&self) -> Result<TimeStepping, ConfigError> {
        let h = self.side_length / self.intervals as f64;
        Ok(TimeStepping::new(self.dt.resolve(h), self.final_time)?.with_scheme(self.scheme))
    }

    pub fn initial(&self) -> InitialCondition {
        InitialCondition {
            amplitude: self.amplitude,
            center: self.center,
            width: self.width,
            velocity: self.velocity,
        }
    }

    pub fn layout(&self) -> Result<BoundaryLayout, ConfigError> {
        Ok(BoundaryLayout::for_case(self.boundary, &self.grid()?)
            .with_dirichlet_velocity(self.dirichlet_velocity))
    }

    pub fn snapshot_steps(&self) -> Result<Vec<usize>, ConfigError> {
        let n = self.time()?.steps;
        Ok(match &self.snapshots {
            SnapshotRule::None => Vec::new(),
            SnapshotRule::Quarters => {
                let mut v: Vec<usize> = (0..=4).map(|q| q * n / 4).collect();
                v.dedup();
                v
            }
            SnapshotRule::Steps(s) => s.clone(),
        })
    }

    pub fn plan(&self) -> Result<RunPlan, ConfigError> {
        self.validate()?;
        Ok(RunPlan {
            grid: self.grid()?,
            params: self.params()?,
            layout: self.layout()?,
            initial: self.initial(),
            time: self.time()?,
            energy_every: self.energy_every,
            snapshot_steps: self.snapshot_steps()?,
        })
    }

    /// The same configuration as a single-case run with the given transmission
    /// constant and initial data family.
    pub fn sweep_cell(&self, c0: f64, case: InitialCase) -> RunConfig {
        let ic = case.condition();
        RunConfig {
            c0,
            center: ic.center,
            width: ic.width,
            velocity: ic.velocity,
            sweep: None,
            ..self.clone()
        }
    }

    /// Serialize as configuration text with every key explicit.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let dt = match self.dt {
            TimeStepRule::Fixed(v) => v.to_string(),
            TimeStepRule::SpacingMultiple(k) => format!("{k}h"),
        };
        let snaps = match &self.snapshots {
            SnapshotRule::None => "none".to_string(),
            SnapshotRule::Quarters => "quarters".to_string(),
            SnapshotRule::Steps(v) => join(v),
        };
        let _ = writeln!(s, "L = {}", self.side_length);
        let _ = writeln!(s, "N = {}", self.intervals);
        let _ = writeln!(s, "dt = {dt}");
        let _ = writeln!(s, "T = {}", self.final_time);
        let _ = writeln!(s, "time_scheme = {}", self.scheme);
        let _ = writeln!(s, "rho = {}", self.rho);
        let _ = writeln!(s, "mu = {}", self.mu);
        let _ = writeln!(s, "g = {}", self.g);
        let _ = writeln!(s, "a = {}", self.depth);
        let _ = writeln!(s, "c0 = {}", self.c0);
        let _ = writeln!(s, "c1 = {}", self.amplitude);
        let _ = writeln!(s, "width = {}", self.width);
        let _ = writeln!(s, "p = {}", join(&self.center));
        let _ = writeln!(s, "u0 = {}", join(&self.velocity));
        let _ = writeln!(s, "boundary = {}", self.boundary);
        let _ = writeln!(s, "u_d = {}", join(&self.dirichlet_velocity));
        let _ = writeln!(s, "snapshot_steps = {snaps}");
        let _ = writeln!(s, "energy_every = {}", self.energy_every);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "exclude_initial = {}", self.exclude_initial);
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "sweep_c0 = {}", join(&sw.c0_values));
            let _ = writeln!(s, "sweep_cases = {}", join(&sw.cases));
        }
        s
    }
}
