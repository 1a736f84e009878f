//! `run` and `resume`: drive a simulation and write its output directory.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use micropolar::diagnostics::{detect_t0, record, DecayFit, DiagnosticsRecord};
use micropolar::dynamics::{make_initial, Stepper};
use micropolar::{Error, SimState};

use crate::checkpoint;
use crate::config::RunConfig;
use crate::output::{csv_row, report, RunStats, CSV_HEADER};

pub const CSV_NAME: &str = "diagnostics.csv";
pub const REPORT_NAME: &str = "report.txt";
pub const CHECKPOINT_NAME: &str = "checkpoint.bin";
pub const LOCK_NAME: &str = ".lock";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum RunFailure {
    /// Bad config, unreadable checkpoint, mismatched dimensions or a held lock.
    Setup(Error),
    /// CFL violation or non-finite state; the last good state is in `checkpoint`.
    Aborted { error: Error, checkpoint: PathBuf },
    /// Filesystem error while writing output.
    Io(Error),
}

impl RunFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunFailure::Setup(_) => EXIT_USAGE,
            RunFailure::Aborted { .. } | RunFailure::Io(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunFailure::Setup(e) => write!(f, "{e}"),
            RunFailure::Aborted { error, checkpoint } => {
                write!(f, "{error}; last good state in {}", checkpoint.display())
            }
            RunFailure::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub stats: RunStats,
    pub fit: Option<DecayFit>,
    /// Records written to the CSV in this invocation.
    pub rows: Vec<DiagnosticsRecord>,
    pub final_state: SimState,
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<Self, Error> {
        let path = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(dir.to_path_buf())),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn prepare_dir(dir: &Path) -> Result<DirLock, RunFailure> {
    fs::create_dir_all(dir).map_err(|e| RunFailure::Setup(e.into()))?;
    DirLock::acquire(dir).map_err(RunFailure::Setup)
}

pub fn run(cfg: &RunConfig) -> Result<RunSummary, RunFailure> {
    cfg.validate().map_err(RunFailure::Setup)?;
    let grid = cfg.make_grid().map_err(RunFailure::Setup)?;
    let s0 = make_initial(&cfg.initial_condition(), &grid).map_err(RunFailure::Setup)?;
    let _lock = prepare_dir(&cfg.output.dir)?;
    let csv = File::create(cfg.output.dir.join(CSV_NAME)).map_err(|e| RunFailure::Io(e.into()))?;
    let mut csv = BufWriter::new(csv);
    csv.write_all(CSV_HEADER.as_bytes())
        .and_then(|_| csv.write_all(b"\n"))
        .map_err(|e| RunFailure::Io(e.into()))?;
    execute(cfg, s0, csv)
}

/// Continues from a checkpoint. CSV rows at or after the checkpoint time are
/// replaced, and the energy ledger restarts at the checkpoint time.
pub fn resume(checkpoint_path: &Path, cfg: &RunConfig) -> Result<RunSummary, RunFailure> {
    cfg.validate().map_err(RunFailure::Setup)?;
    let ck = checkpoint::read(checkpoint_path).map_err(RunFailure::Setup)?;
    let g = ck.state.grid();
    if g.n() != cfg.grid.n || g.box_length() != cfg.grid.box_length {
        return Err(RunFailure::Setup(Error::Checkpoint(format!(
            "dimension mismatch: checkpoint has n = {}, L = {}; config has n = {}, L = {}",
            g.n(),
            g.box_length(),
            cfg.grid.n,
            cfg.grid.box_length
        ))));
    }
    let p = cfg.physical_params().map_err(RunFailure::Setup)?;
    if ck.params != p {
        return Err(RunFailure::Setup(Error::Checkpoint(format!(
            "parameter mismatch: checkpoint has {:?}, config has {:?}",
            ck.params, p
        ))));
    }
    let _lock = prepare_dir(&cfg.output.dir)?;
    let csv_path = cfg.output.dir.join(CSV_NAME);
    let mut kept = format!("{CSV_HEADER}\n");
    if let Ok(text) = fs::read_to_string(&csv_path) {
        for line in text.lines().skip(1) {
            let t = line.split(',').next().and_then(|v| v.parse::<f64>().ok());
            if t.is_some_and(|t| t < ck.state.t) {
                kept.push_str(line);
                kept.push('\n');
            }
        }
    }
    let mut csv = BufWriter::new(File::create(&csv_path).map_err(|e| RunFailure::Io(e.into()))?);
    csv.write_all(kept.as_bytes()).map_err(|e| RunFailure::Io(e.into()))?;
    execute(cfg, ck.state, csv)
}

fn execute(cfg: &RunConfig, start: SimState, mut csv: BufWriter<File>) -> Result<RunSummary, RunFailure> {
    let dir = cfg.output.dir.clone();
    let p = cfg.physical_params().map_err(RunFailure::Setup)?;
    let stepper_cfg = cfg.stepper_config().map_err(RunFailure::Setup)?;
    let stepper = Stepper::new(start.grid(), p, stepper_cfg).map_err(RunFailure::Setup)?;
    let io = |e: std::io::Error| RunFailure::Io(e.into());
    let ck_path = dir.join(CHECKPOINT_NAME);

    let t0 = start.t;
    let total = ((stepper_cfg.t_end - t0) / stepper_cfg.dt - 1e-9).ceil().max(0.0) as u64;
    let mut stats = RunStats {
        t_start: t0,
        t_end: t0,
        steps: 0,
        max_ledger_excess: 0.0,
        max_balance_residual: 0.0,
    };
    let track = |r: &DiagnosticsRecord, stats: &mut RunStats| {
        if r.energy_ledger_rhs > 0.0 {
            stats.max_ledger_excess = stats.max_ledger_excess.max(r.energy_ledger_lhs / r.energy_ledger_rhs - 1.0);
        }
        stats.max_balance_residual = stats.max_balance_residual.max(r.balance_residual);
        stats.t_end = r.t;
    };

    let mut s = start;
    let mut rec = record(&s, &p, None).map_err(RunFailure::Setup)?;
    track(&rec, &mut stats);
    csv.write_all(csv_row(&rec).as_bytes()).map_err(io)?;
    let mut rows = vec![rec.clone()];
    let mut abort: Option<Error> = None;
    for step in 1..=total {
        let next = stepper.step(&s).and_then(|mut next| {
            next.t = t0 + step as f64 * stepper_cfg.dt;
            let r = record(&next, &p, Some(&rec))?;
            Ok((next, r))
        });
        match next {
            Ok((next, r)) => {
                s = next;
                rec = r;
            }
            Err(e) => {
                abort = Some(e);
                break;
            }
        }
        stats.steps = step;
        track(&rec, &mut stats);
        if step % cfg.output.cadence == 0 || step == total {
            csv.write_all(csv_row(&rec).as_bytes()).map_err(io)?;
            rows.push(rec.clone());
        }
        if cfg.output.checkpoint_every > 0 && step % cfg.output.checkpoint_every == 0 {
            checkpoint::write(&ck_path, &s, &p).map_err(RunFailure::Io)?;
        }
    }
    csv.flush().map_err(io)?;
    checkpoint::write(&ck_path, &s, &p).map_err(RunFailure::Io)?;
    let fit = detect_t0(&rows, &p).ok();
    let status = match &abort {
        None => "completed".to_string(),
        Some(e) => format!("aborted: {e}"),
    };
    fs::write(dir.join(REPORT_NAME), report(&p, &stats, fit.as_ref(), &status)).map_err(io)?;
    if let Some(error) = abort {
        return Err(RunFailure::Aborted {
            error,
            checkpoint: ck_path,
        });
    }
    Ok(RunSummary {
        dir,
        stats,
        fit,
        rows,
        final_state: s,
    })
}

