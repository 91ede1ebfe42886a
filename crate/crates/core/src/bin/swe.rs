//! Command-line driver: single runs, calibration sweeps, the five-case energy
//! study, and the transmission-boundary sign check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swe_core::diagnostics::{extrema_table, theorem2_check, EnergyRecord, Extrema, Theorem2Report};
use swe_core::experiments::{comparison_report, preset_names, run_sweep};
use swe_core::io::{snapshot_path, write_snapshot, write_sweep_csv, EnergyCsv};
use swe_core::solver::{run, RunObserver, StepView};
use swe_core::{BoundaryCase, Error, RunConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_THEOREM: u8 = 3;

#[derive(Parser)]
#[command(name = "swe", version, about = "Shallow-water solver with transmission boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file, or a preset name when no such file exists.
    #[arg(long)]
    config: String,
    /// Extra `key=value` overrides applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation, writing snapshots and energy.csv.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep the transmission constant and write sweep.csv plus a comparison report.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Exit successfully even if some cells failed.
        #[arg(long)]
        allow_partial: bool,
        /// Multiplier applied to computed norms in the comparison report.
        #[arg(long, default_value_t = 1.0)]
        report_scale: f64,
    },
    /// Run the energy study for all five boundary cases and print integral extrema.
    Energy {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check the transmission-boundary sign estimate at every recorded step.
    CheckThm2 {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        alpha: Option<f64>,
        /// Allowance relative to the largest |I_h2| seen on the transmission boundary.
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
    },
    /// List available presets.
    Presets,
}

enum Failure {
    Config(String),
    Runtime(String),
    Theorem(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Usage(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(args: &ConfigArgs) -> Result<RunConfig, Failure> {
    let path = Path::new(&args.config);
    let mut text = if path.exists() {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
    } else {
        format!("preset = {}\n", args.config)
    };
    for o in &args.overrides {
        text.push_str(o);
        text.push('\n');
    }
    RunConfig::parse(&text).map_err(|e| Failure::Config(e.to_string()))
}

/// Streams energy records and snapshots to an output directory.
struct FileSink {
    out: PathBuf,
    energy: EnergyCsv,
    records: Vec<EnergyRecord>,
    snapshots: usize,
}

impl FileSink {
    fn new(out: &Path, energy_name: &str) -> Result<Self, Error> {
        Ok(FileSink {
            out: out.to_path_buf(),
            energy: EnergyCsv::create(&out.join(energy_name))?,
            records: Vec::new(),
            snapshots: 0,
        })
    }
}

impl RunObserver for FileSink {
    fn on_record(&mut self, r: &EnergyRecord, _: &StepView<'_>) -> Result<(), Error> {
        self.energy.push(r)?;
        self.records.push(*r);
        Ok(())
    }

    fn on_snapshot(&mut self, v: &StepView<'_>) -> Result<(), Error> {
        write_snapshot(v.state, v.grid, &snapshot_path(&self.out, v.state.step))?;
        self.snapshots += 1;
        Ok(())
    }
}

impl Drop for FileSink {
    fn drop(&mut self) {
        let _ = self.energy.flush();
    }
}

fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let plan = cfg.plan().map_err(|e| Failure::Config(e.to_string()))?;
    let mut sink = FileSink::new(out, "energy.csv")?;
    let result = run(&plan, &mut sink);
    sink.energy.flush().map_err(Error::from)?;
    let summary = result?;
    println!(
        "completed {} steps; {} snapshots and {} energy records in {}",
        summary.steps,
        sink.snapshots,
        sink.records.len(),
        out.display()
    );
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: &Path, jobs: usize, allow_partial: bool, scale: f64) -> Result<(), Failure> {
    if cfg.sweep.is_none() {
        return Err(Failure::Config(
            "configuration has no sweep settings (use a c0-sweep preset or sweep_c0/sweep_cases)".into(),
        ));
    }
    let result = run_sweep(cfg, jobs.max(1))?;
    write_sweep_csv(&result, &out.join("sweep.csv")).map_err(Error::from)?;
    let report = comparison_report(&result, scale);
    std::fs::write(out.join("sweep_report.txt"), &report)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    print!("{report}");
    let failed = result.failures();
    if failed > 0 && !allow_partial {
        return Err(Failure::Runtime(format!("{failed} sweep cells failed")));
    }
    Ok(())
}

fn fmt_extrema(e: &[Extrema; 4]) -> String {
    let mut s = format!("{:>4} {:>12} {:>12} {:>12} {:>12}\n", "", "I_h1", "I_h2", "I_h3", "I_h4");
    s += &format!("{:>4}", "max");
    for x in e {
        s += &format!(" {:>12.3e}", x.max);
    }
    s += &format!("\n{:>4}", "min");
    for x in e {
        s += &format!(" {:>12.3e}", x.min);
    }
    s.push('\n');
    s
}

fn cmd_energy(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let mut text = String::new();
    for case in BoundaryCase::ALL {
        let case_cfg = RunConfig {
            boundary: case,
            energy_every: cfg.energy_every.max(1),
            ..cfg.clone()
        };
        let plan = case_cfg.plan().map_err(|e| Failure::Config(e.to_string()))?;
        let case_dir = out.join(format!("case_{case}"));
        let mut sink = FileSink::new(&case_dir, "energy.csv")?;
        let result = run(&plan, &mut sink);
        sink.energy.flush().map_err(Error::from)?;
        result?;
        let e = extrema_table(&sink.records, cfg.exclude_initial).map_err(Error::from)?;
        let block = format!(
            "case ({case}), {} transmission edges\n{}",
            case.transmission_edges(),
            fmt_extrema(&e)
        );
        print!("{block}");
        text += &block;
    }
    std::fs::write(out.join("extrema.txt"), text)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    Ok(())
}

struct Thm2Collector {
    alpha: f64,
    reports: Vec<Theorem2Report>,
}

impl RunObserver for Thm2Collector {
    fn on_record(&mut self, _: &EnergyRecord, v: &StepView<'_>) -> Result<(), Error> {
        let r = theorem2_check(v.state, v.grid, v.layout, v.params, self.alpha)?;
        self.reports.push(r);
        Ok(())
    }
}

fn cmd_check(cfg: &RunConfig, alpha: Option<f64>, rel_tol: f64) -> Result<(), Failure> {
    let mut cfg = cfg.clone();
    if let Some(a) = alpha {
        cfg.alpha = a;
    }
    cfg.energy_every = cfg.energy_every.max(1);
    cfg.snapshots = swe_core::config::SnapshotRule::None;
    let plan = cfg.plan().map_err(|e| Failure::Config(e.to_string()))?;
    let mut obs = Thm2Collector {
        alpha: cfg.alpha,
        reports: Vec::new(),
    };
    run(&plan, &mut obs)?;
    let scale = obs
        .reports
        .iter()
        .map(|r| r.i2_transmission.abs())
        .fold(0.0, f64::max);
    let tol = rel_tol * scale;
    let checked = obs.reports.iter().filter(|r| r.conditions_hold()).count();
    let violations: Vec<&Theorem2Report> = obs.reports.iter().filter(|r| !r.holds_within(tol)).collect();
    let bound = obs.reports.first().map(|r| r.c0_bound).unwrap_or(f64::NAN);
    println!(
        "alpha = {}, c0 = {}, c0 bound = {bound:.6}; {} recorded steps, conditions held at {checked}",
        cfg.alpha,
        cfg.c0,
        obs.reports.len()
    );
    if let Some(worst) = obs.reports.iter().map(|r| r.i12_sum).reduce(f64::max) {
        println!("max I_h1 + I_h2 on the transmission boundary: {worst:.6e} (allowance {tol:.3e})");
    }
    if violations.is_empty() {
        println!("implication holds at every recorded step");
        Ok(())
    } else {
        Err(Failure::Theorem(format!(
            "implication violated at {} steps, first at k = {} (I_h1 + I_h2 = {:e})",
            violations.len(),
            violations[0].step,
            violations[0].i12_sum
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Run { config, out } => load(config).and_then(|c| cmd_run(&c, out)),
        Command::Sweep {
            config,
            out,
            jobs,
            allow_partial,
            report_scale,
        } => load(config).and_then(|c| cmd_sweep(&c, out, *jobs, *allow_partial, *report_scale)),
        Command::Energy { config, out } => load(config).and_then(|c| cmd_energy(&c, out)),
        Command::CheckThm2 { config, alpha, rel_tol } => {
            load(config).and_then(|c| cmd_check(&c, *alpha, *rel_tol))
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("runtime error: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Theorem(m)) => {
            eprintln!("theorem check failed: {m}");
            ExitCode::from(EXIT_THEOREM)
        }
    }
}
