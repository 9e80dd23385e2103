//! The `harmavg` command line: `solve`, `verify` and `study`, each driven by
//! one TOML config file.
//!
//! Exit codes: 0 success, 1 config or IO error, 2 `max_iter`, 3 stalled,
//! 4 failed verification.

pub mod config;
pub mod pgm;
mod study;
mod verify;

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::csv::write_csv;
use crate::field::GridField;
use crate::iteration::{run_observed, IterationReport, Monitors, Verdict};
use crate::oracles::{barrier_constant, sandwich_tolerance, Barrier, Sandwich};

pub use config::{bump, Instance, RunConfig};
pub use study::{cmd_study, parse_sweep, run_study, study_csv, StudyRow, Sweep, SweepParam};
pub use verify::{cmd_verify, run_suite, Check, Suite, VerifyReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_STALLED: u8 = 3;
pub const EXIT_FAILED: u8 = 4;

pub fn verdict_exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Converged => EXIT_OK,
        Verdict::MaxIter => EXIT_MAX_ITER,
        Verdict::Stalled => EXIT_STALLED,
    }
}

/// Monitors for a run: the sampled oracle, plus the barrier sandwich when
/// the domain has a closed-form barrier and `f0` matches the oracle on the
/// boundary.
pub fn monitors(inst: &Instance) -> Result<Monitors> {
    let Some(oracle) = &inst.oracle else {
        return Ok(Monitors::default());
    };
    let u = oracle.sample(&inst.lattice)?;
    let sandwich = match Barrier::new(inst.lattice.domain()) {
        Ok(barrier) => {
            let h = barrier.sample(&inst.lattice);
            match barrier_constant(&inst.f0, &u, &h) {
                Ok(k) => {
                    let tol = sandwich_tolerance(&inst.operator, &u, &inst.boundary)?;
                    Some(Sandwich::new(u.clone(), h, k.k, tol)?)
                }
                Err(Error::BoundaryMismatch { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        Err(_) => None,
    };
    Ok(Monitors {
        oracle: Some(u),
        sandwich,
    })
}

/// Runs the configured iteration. The report carries the config and, only
/// when `outputs.record_wall_time` is set, the wall time.
pub fn solve(config: &RunConfig, quiet: bool) -> Result<(GridField, IterationReport)> {
    let inst = config.build()?;
    let monitors = monitors(&inst)?;
    let (field, mut report) = run_observed(
        &inst.operator,
        inst.f0.clone(),
        &inst.boundary,
        &config.stop,
        &monitors,
        |step, diff| {
            if !quiet && step % 100 == 0 {
                eprintln!("step {step}: sup diff {diff:.3e}");
            }
        },
    )?;
    if !config.outputs.record_wall_time {
        report.wall_time_seconds = None;
    }
    report.config = config.to_json();
    Ok((field, report))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `harmavg solve`: iterate, write the configured outputs, map the verdict
/// to an exit code.
pub fn cmd_solve(config: &RunConfig, quiet: bool) -> Result<u8> {
    let (field, report) = solve(config, quiet)?;
    let out = &config.outputs;
    if let Some(p) = &out.field_csv {
        write_csv(&field, &config.output_path(p))?;
    }
    if let Some(p) = &out.report_json {
        write_text(&config.output_path(p), &(report.to_json() + "\n"))?;
    }
    if let Some(p) = &out.image_pgm {
        pgm::write_pgm(&field, &config.output_path(p))?;
    }
    if !quiet {
        let last = report.sup_diff_history.last().copied().unwrap_or(f64::NAN);
        print!(
            "{:?} after {} iterations, last step {last:.3e}",
            report.verdict, report.iterations
        );
        if let Some(e) = report.oracle_error_history.last() {
            print!(", oracle error {e:.3e}");
        }
        println!();
    }
    Ok(verdict_exit_code(report.verdict))
}
