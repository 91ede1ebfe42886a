//! CSV persistence for field snapshots, energy records and sweep results.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::EnergyRecord;
use crate::error::IoError;
use crate::experiments::SweepResult;
use crate::grid::{GridSpec, NodeField};
use crate::state::State;

pub const SNAPSHOT_HEADER: &str = "i,j,x1,x2,eta,phi,u1,u2";
pub const ENERGY_HEADER: &str = "k,t,E_h,I_h1,I_h2,I_h3,I_h4,sum_I";
pub const SWEEP_HEADER: &str = "case,c0,S_total,status";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Nodal fields, one row per node with `i` varying fastest.
pub fn write_snapshot(state: &State, grid: &GridSpec, path: &Path) -> Result<(), IoError> {
    let mut w = create(path)?;
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "{SNAPSHOT_HEADER}")?;
        for (i, j) in grid.nodes() {
            let (x1, x2) = grid.coord(i, j);
            writeln!(
                w,
                "{i},{j},{},{},{},{},{},{}",
                num(x1),
                num(x2),
                num(state.eta[(i, j)]),
                num(state.phi[(i, j)]),
                num(state.u1[(i, j)]),
                num(state.u2[(i, j)]),
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(path))
}

/// Read a snapshot written by [`write_snapshot`] back into a state at `step`.
pub fn read_snapshot(grid: &GridSpec, path: &Path, step: usize) -> Result<State, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    let parse_err = |line: usize, reason: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut fields: [NodeField; 4] = std::array::from_fn(|_| NodeField::zeros(grid));
    let mut rows = 0;
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if n == 0 {
            if line.trim() != SNAPSHOT_HEADER {
                return Err(parse_err(1, format!("unexpected header `{line}`")));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(parse_err(n + 1, format!("expected 8 columns, got {}", cols.len())));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v <= grid.intervals())
                .ok_or_else(|| parse_err(n + 1, format!("bad node index `{s}`")))
        };
        let (i, j) = (idx(cols[0])?, idx(cols[1])?);
        for (f, s) in fields.iter_mut().zip(&cols[4..]) {
            f[(i, j)] = s
                .parse()
                .map_err(|_| parse_err(n + 1, format!("bad number `{s}`")))?;
        }
        rows += 1;
    }
    if rows != grid.node_count() {
        return Err(parse_err(
            rows + 1,
            format!("expected {} rows, got {rows}", grid.node_count()),
        ));
    }
    let [eta, phi, u1, u2] = fields;
    Ok(State {
        step,
        phi,
        u1,
        u2,
        eta,
    })
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("snapshot_{step:06}.csv"))
}

pub fn energy_row(r: &EnergyRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.step,
        num(r.time),
        num(r.energy),
        num(r.i1),
        num(r.i2),
        num(r.i3),
        num(r.i4),
        num(r.sum)
    )
}

/// Streaming writer for energy records.
pub struct EnergyCsv {
    path: PathBuf,
    w: BufWriter<File>,
}

impl EnergyCsv {
    pub fn create(path: &Path) -> Result<Self, IoError> {
        let mut w = create(path)?;
        writeln!(w, "{ENERGY_HEADER}").map_err(io_err(path))?;
        Ok(EnergyCsv {
            path: path.to_path_buf(),
            w,
        })
    }

    pub fn push(&mut self, r: &EnergyRecord) -> Result<(), IoError> {
        writeln!(self.w, "{}", energy_row(r)).map_err(io_err(&self.path))
    }

    pub fn flush(&mut self) -> Result<(), IoError> {
        self.w.flush().map_err(io_err(&self.path))
    }
}

pub fn write_energy_csv(records: &[EnergyRecord], path: &Path) -> Result<(), IoError> {
    let mut w = EnergyCsv::create(path)?;
    for r in records {
        w.push(r)?;
    }
    w.flush()
}

pub fn read_energy_csv(path: &Path) -> Result<Vec<EnergyRecord>, IoError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(ENERGY_HEADER) {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: "missing energy header".into(),
        });
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let bad = |reason: String| IoError::Parse {
                path: path.to_path_buf(),
                line: n + 2,
                reason,
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(bad(format!("expected 8 columns, got {}", cols.len())));
            }
            let step = cols[0].parse().map_err(|_| bad(format!("bad step `{}`", cols[0])))?;
            let mut v = [0.0; 7];
            for (slot, s) in v.iter_mut().zip(&cols[1..]) {
                *slot = s.parse().map_err(|_| bad(format!("bad number `{s}`")))?;
            }
            Ok(EnergyRecord {
                step,
                time: v[0],
                energy: v[1],
                i1: v[2],
                i2: v[3],
                i3: v[4],
                i4: v[5],
                sum: v[6],
            })
        })
        .collect()
}

/// Sweep table; the minimizing successful cell of each case has status `argmin`.
pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<(), IoError> {
    let mut w = create(path)?;
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "{SWEEP_HEADER}")?;
        for cell in &result.cells {
            match &cell.value {
                Ok(v) => {
                    let status = if result.argmin(cell.case) == Some(cell.c0) {
                        "argmin"
                    } else {
                        "ok"
                    };
                    writeln!(w, "{},{},{},{status}", cell.case, cell.c0, num(*v))?;
                }
                Err(e) => {
                    let msg = e.replace([',', '\n'], " ");
                    writeln!(w, "{},{},,failed: {msg}", cell.case, cell.c0)?;
                }
            }
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(path))
}
