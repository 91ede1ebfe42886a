//! Preset configurations, the space-time elevation norm, and the sweep over
//! the transmission constant.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::boundary::BoundaryCase;
use crate::config::{RunConfig, SnapshotRule, SweepSettings, TimeStepRule};
use crate::error::{ConfigError, UsageError};
use crate::grid::GridSpec;
use crate::solver::{run, RunObserver, StepView};
use crate::state::{InitialCase, State};

/// Transmission constants evaluated by the calibration sweep.
pub const SWEEP_C0: [f64; 13] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.5];

/// `sqrt(h^2 sum eta^2)` over all nodes, boundary included.
pub fn s_norm(state: &State, grid: &GridSpec) -> f64 {
    let sum: f64 = state.eta.as_slice().iter().map(|e| e * e).sum();
    grid.spacing() * sum.sqrt()
}

/// `sqrt(dt * sum_k S_k^2)` over `k = 0..=steps`.
pub fn time_accumulated_norm(series: &[f64], dt: f64, steps: usize) -> Result<f64, UsageError> {
    if series.len() != steps + 1 {
        return Err(UsageError(format!(
            "expected {} norm values for {steps} steps, got {}",
            steps + 1,
            series.len()
        )));
    }
    Ok((dt * series.iter().map(|s| s * s).sum::<f64>()).sqrt())
}

/// Collects `S_h^k` at every step.
#[derive(Debug, Default)]
pub struct NormSeries(pub Vec<f64>);

impl RunObserver for NormSeries {
    fn on_step(&mut self, view: &StepView<'_>) -> Result<(), crate::Error> {
        self.0.push(s_norm(view.state, view.grid));
        Ok(())
    }
}

const FIG3: &str = "fig3";
const ENERGY: &str = "energy-study";
const SWEEP: &str = "c0-sweep";

fn fig3_base() -> RunConfig {
    RunConfig {
        side_length: 10.0,
        intervals: 1000,
        dt: TimeStepRule::Fixed(0.05),
        final_time: 100.0,
        depth: 1.0,
        c0: 0.9,
        amplitude: 0.01,
        width: 100.0,
        center: [5.0, 5.0],
        velocity: [0.0, 0.0],
        energy_every: 10,
        snapshots: SnapshotRule::Quarters,
        ..RunConfig::default()
    }
}

fn energy_base() -> RunConfig {
    RunConfig {
        side_length: 1.0,
        intervals: 400,
        dt: TimeStepRule::SpacingMultiple(2.0),
        final_time: 100.0,
        depth: 0.1,
        c0: 0.9,
        amplitude: 1e-3,
        width: 100.0,
        center: [0.5, 0.5],
        velocity: [0.0, 0.0],
        energy_every: 1,
        snapshots: SnapshotRule::Quarters,
        ..RunConfig::default()
    }
}

fn sweep_base() -> RunConfig {
    RunConfig {
        dt: TimeStepRule::Fixed(0.005),
        boundary: BoundaryCase::V,
        energy_every: 0,
        snapshots: SnapshotRule::None,
        sweep: Some(SweepSettings {
            c0_values: SWEEP_C0.to_vec(),
            cases: InitialCase::ALL.to_vec(),
        }),
        ..energy_base()
    }
}

/// Canonical preset names (each also accepts an `-N<n>` resolution suffix).
pub fn preset_names() -> Vec<String> {
    let mut v = Vec::new();
    for base in [FIG3, ENERGY] {
        v.extend(BoundaryCase::ALL.iter().map(|c| format!("{base}-{c}")));
    }
    v.push(SWEEP.to_string());
    v.extend(InitialCase::ALL.iter().map(|c| format!("{SWEEP}-{c}")));
    v
}

fn unknown(name: &str) -> ConfigError {
    ConfigError::UnknownPreset {
        name: name.to_string(),
        available: format!("{} (optionally suffixed -N<n>)", preset_names().join(", ")),
    }
}

/// Expand a preset name such as `fig3-v`, `energy-study-iii-N500` or `c0-sweep-IV`.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let name = name.trim();
    let (base, rest) = [FIG3, ENERGY, SWEEP]
        .into_iter()
        .find_map(|b| name.strip_prefix(b).map(|r| (b, r)))
        .ok_or_else(|| unknown(name))?;
    let mut tokens: Vec<&str> = rest.split('-').filter(|t| !t.is_empty()).collect();
    let mut resolution = None;
    if let Some(last) = tokens.last() {
        if let Some(n) = last.strip_prefix('N').and_then(|n| n.parse::<usize>().ok()) {
            if n < 2 {
                return Err(ConfigError::invalid("N", format!("preset resolution {n} too small")));
            }
            resolution = Some(n);
            tokens.pop();
        }
    }
    if tokens.len() > 1 {
        return Err(unknown(name));
    }
    let variant = tokens.first().copied();
    let mut cfg = match base {
        SWEEP => {
            let mut cfg = sweep_base();
            if let Some(v) = variant {
                let case = v.parse::<InitialCase>().map_err(|_| unknown(name))?;
                if let Some(s) = cfg.sweep.as_mut() {
                    s.cases = vec![case];
                }
            }
            cfg
        }
        _ => {
            let mut cfg = if base == FIG3 { fig3_base() } else { energy_base() };
            if let Some(v) = variant {
                cfg.boundary = v.parse::<BoundaryCase>().map_err(|_| unknown(name))?;
            }
            cfg
        }
    };
    if let Some(n) = resolution {
        cfg.intervals = n;
    }
    Ok(cfg)
}

/// One `(c0, case)` cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub case: InitialCase,
    pub c0: f64,
    /// Space-time norm, or the failure message.
    pub value: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub c0_values: Vec<f64>,
    pub cases: Vec<InitialCase>,
    /// Ordered by case, then by `c0`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn value(&self, case: InitialCase, c0: f64) -> Option<&Result<f64, String>> {
        self.cells
            .iter()
            .find(|c| c.case == case && c.c0 == c0)
            .map(|c| &c.value)
    }

    pub fn column(&self, case: InitialCase) -> Vec<(f64, Option<f64>)> {
        self.cells
            .iter()
            .filter(|c| c.case == case)
            .map(|c| (c.c0, c.value.as_ref().ok().copied()))
            .collect()
    }

    /// `c0` minimizing the norm among successful cells of one case.
    pub fn argmin(&self, case: InitialCase) -> Option<f64> {
        self.column(case)
            .into_iter()
            .filter_map(|(c0, v)| v.map(|v| (c0, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c0, _)| c0)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.value.is_err()).count()
    }
}

/// Space-time elevation norm for one run configuration.
pub fn space_time_norm(cfg: &RunConfig) -> Result<f64, crate::Error> {
    let mut plan = cfg.plan()?;
    plan.energy_every = 0;
    plan.snapshot_steps.clear();
    let mut series = NormSeries::default();
    let summary = run(&plan, &mut series)?;
    Ok(time_accumulated_norm(&series.0, plan.time.dt, summary.steps)?)
}

/// Run every `(c0, case)` cell of a sweep configuration on up to `jobs` threads.
/// Failed cells are recorded, not fatal.
pub fn run_sweep(cfg: &RunConfig, jobs: usize) -> Result<SweepResult, crate::Error> {
    cfg.validate()?;
    let settings = cfg
        .sweep
        .clone()
        .ok_or_else(|| UsageError("configuration has no sweep settings".into()))?;
    let keys: Vec<(InitialCase, f64)> = settings
        .cases
        .iter()
        .flat_map(|&case| settings.c0_values.iter().map(move |&c0| (case, c0)))
        .collect();
    let eval = |&(case, c0): &(InitialCase, f64)| SweepCell {
        case,
        c0,
        value: space_time_norm(&cfg.sweep_cell(c0, case)).map_err(|e| e.to_string()),
    };
    let cells: Vec<SweepCell> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| UsageError(format!("cannot start worker pool: {e}")))?;
        pool.install(|| keys.par_iter().map(eval).collect())
    } else {
        keys.iter().map(eval).collect()
    };
    Ok(SweepResult {
        c0_values: settings.c0_values,
        cases: settings.cases,
        cells,
    })
}

/// Published reference values used for comparison reports.
pub mod reference {
    use crate::state::InitialCase;

    /// Extremes of the four energy-rate integrals over `(0, T)` for the energy
    /// study at `N = 400`, one row per number of transmission edges (0..=4).
    /// Each row holds `[max, min]` for `I_h1, I_h2, I_h3, I_h4`.
    pub const INTEGRAL_EXTREMA: [[[f64; 2]; 4]; 5] = [
        [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, -8.59e-4]],
        [[1.10e-4, -2.59e-3], [0.0, -3.37], [1.44e-6, -1.25e-6], [0.0, -3.76e-4]],
        [[1.86e-4, -3.38e-3], [0.0, -6.27], [1.72e-6, -2.50e-6], [0.0, -2.29e-4]],
        [[1.43e-4, -5.06e-3], [0.0, -9.40], [2.58e-6, -3.75e-6], [0.0, -1.73e-4]],
        [[2.87e-4, -6.75e-3], [0.0, -12.54], [3.47e-6, -5.01e-6], [0.0, -1.13e-4]],
    ];

    /// Space-time norm by `c0` (rows follow `SWEEP_C0`) and initial case (columns I..VI),
    /// as printed.
    pub const SPACE_TIME_NORM: [[f64; 6]; 13] = [
        [12.17, 8.52, 8.14, 5.47, 44.48, 44.48],
        [9.88, 6.96, 6.35, 4.04, 34.36, 34.37],
        [8.84, 6.24, 5.52, 3.35, 28.74, 28.75],
        [8.27, 5.84, 5.08, 2.98, 25.23, 25.24],
        [7.93, 5.61, 4.84, 2.79, 22.82, 22.83],
        [7.71, 5.46, 4.71, 2.69, 21.05, 21.06],
        [7.58, 5.37, 4.65, 2.66, 19.69, 19.69],
        [7.51, 5.32, 4.63, 2.67, 18.60, 18.61],
        [7.4792, 5.2951, 4.64, 2.70, 17.71, 17.72],
        [7.4795, 5.2959, 4.68, 2.75, 16.98, 16.98],
        [7.50, 5.31, 4.73, 2.82, 16.36, 16.36],
        [7.55, 5.34, 4.79, 2.89, 15.83, 15.84],
        [7.75, 5.49, 5.02, 3.12, 14.66, 14.66],
    ];

    pub fn space_time_norm(case: InitialCase, c0: f64) -> Option<f64> {
        let row = super::SWEEP_C0.iter().position(|&c| (c - c0).abs() < 1e-12)?;
        Some(SPACE_TIME_NORM[row][case as usize])
    }
}

/// Plain-text comparison of a sweep against the reference table.
pub fn comparison_report(result: &SweepResult, scale: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "space-time elevation norm vs reference (values x {scale:e})");
    let _ = writeln!(s, "{:<5} {:>6} {:>14} {:>10} {:>10}", "case", "c0", "computed", "reference", "rel_err");
    for cell in &result.cells {
        let reference = reference::space_time_norm(cell.case, cell.c0);
        match (&cell.value, reference) {
            (Ok(v), Some(r)) => {
                let scaled = v * scale;
                let _ = writeln!(
                    s,
                    "{:<5} {:>6} {:>14.6} {:>10} {:>10.4}",
                    cell.case,
                    cell.c0,
                    scaled,
                    r,
                    (scaled - r).abs() / r
                );
            }
            (Ok(v), None) => {
                let _ = writeln!(s, "{:<5} {:>6} {:>14.6} {:>10} {:>10}", cell.case, cell.c0, v * scale, "-", "-");
            }
            (Err(e), _) => {
                let _ = writeln!(s, "{:<5} {:>6} failed: {e}", cell.case, cell.c0);
            }
        }
    }
    for &case in &result.cases {
        match result.argmin(case) {
            Some(c0) => {
                let _ = writeln!(s, "argmin case {case}: c0 = {c0}");
            }
            None => {
                let _ = writeln!(s, "argmin case {case}: no successful runs");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NodeField;
    use crate::params::PhysicalParams;

    #[test]
    fn s_norm_closed_forms() {
        let g = GridSpec::new(1.0, 10).unwrap();
        let p = PhysicalParams::standard(0.1, 0.9).unwrap();
        let mut s = State::rest(&g, &p);
        assert_eq!(s_norm(&s, &g), 0.0);
        s.eta = NodeField::filled(&g, 3e-4);
        let expected = 3e-4 * g.spacing() * 11.0;
        assert!((s_norm(&s, &g) - expected).abs() <= 1e-13 * expected);
    }

    #[test]
    fn accumulated_norm() {
        assert_eq!(time_accumulated_norm(&[0.0; 5], 0.1, 4).unwrap(), 0.0);
        let v = time_accumulated_norm(&[2.0; 11], 0.5, 10).unwrap();
        assert!((v - 2.0 * (0.5f64 * 11.0).sqrt()).abs() < 1e-14);
        assert!(time_accumulated_norm(&[1.0; 3], 0.1, 3).is_err());
    }

    #[test]
    fn presets() {
        let c = preset("fig3-v").unwrap();
        assert_eq!((c.side_length, c.intervals, c.depth), (10.0, 1000, 1.0));
        assert_eq!(c.time().unwrap().dt, 0.05);
        assert_eq!(c.center, [5.0, 5.0]);
        assert_eq!(c.amplitude, 0.01);

        let c = preset("energy-study-iii-N500").unwrap();
        assert_eq!((c.side_length, c.depth, c.amplitude), (1.0, 0.1, 1e-3));
        assert_eq!(c.boundary, BoundaryCase::III);
        assert_eq!(c.time().unwrap().dt, 2.0 / 500.0);

        let mut c = preset("energy-study-ii").unwrap();
        let before = c.clone();
        c.set("N", "50").unwrap();
        assert_eq!(c.time().unwrap().dt, 2.0 / 50.0);
        assert_eq!(RunConfig { intervals: 400, ..c }, before);

        let c = preset("c0-sweep-IV-N100").unwrap();
        assert_eq!(c.sweep.as_ref().unwrap().cases, vec![InitialCase::IV]);
        assert_eq!(c.sweep.as_ref().unwrap().c0_values.len(), 13);
        assert_eq!(c.intervals, 100);
        assert_eq!(c.time().unwrap().steps, 20_000);

        let err = preset("fig4").unwrap_err().to_string();
        assert!(err.contains("energy-study-v"), "{err}");
        assert!(preset("energy-study-vi").is_err());
        assert!(preset("c0-sweep-VII").is_err());
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(reference::space_time_norm(InitialCase::I, 0.9), Some(7.4792));
        assert_eq!(reference::space_time_norm(InitialCase::V, 1.5), Some(14.66));
        assert_eq!(reference::space_time_norm(InitialCase::I, 1.3), None);
    }

    #[test]
    fn singleton_sweep_matches_direct_run() {
        let cfg = RunConfig::parse(
            "preset = c0-sweep-I\nN = 8\ndt = 0.01\nT = 0.5\nc0 = 0.7",
        )
        .unwrap();
        let result = run_sweep(&cfg, 1).unwrap();
        assert_eq!(result.cells.len(), 1);
        let direct = space_time_norm(&cfg.sweep_cell(0.7, InitialCase::I)).unwrap();
        assert_eq!(result.cells[0].value, Ok(direct));
        assert_eq!(result.argmin(InitialCase::I), Some(0.7));
    }

    #[test]
    fn parallel_sweep_is_deterministic() {
        let cfg = RunConfig::parse(
            "preset = c0-sweep\nN = 6\ndt = 0.01\nT = 0.2\nsweep_c0 = 0.5,0.9\nsweep_cases = I,V",
        )
        .unwrap();
        let a = run_sweep(&cfg, 1).unwrap();
        let b = run_sweep(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 4);
        assert_eq!(a.failures(), 0);
    }

    #[test]
    fn failed_cells_are_recorded() {
        // A huge step drives the height negative; the sweep keeps going.
        let cfg = RunConfig::parse(
            "preset = c0-sweep\nN = 6\ndt = 50\nT = 500\nc1 = 0.05\nsweep_c0 = 0.9\nsweep_cases = I,II",
        )
        .unwrap();
        let r = run_sweep(&cfg, 1).unwrap();
        assert_eq!(r.cells.len(), 2);
        assert_eq!(r.failures(), 2);
        assert_eq!(r.argmin(InitialCase::I), None);
        assert!(comparison_report(&r, 1.0).contains("failed"));
    }
}
