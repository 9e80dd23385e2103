//! The iteration `f_{n+1} = σ(f_n)` with stopping rules and monitors.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::averaging::AveragingOperator;
use crate::error::{Error, Result};
use crate::field::{BoundaryValues, GridField};
use crate::oracles::Sandwich;

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    /// Stop once `‖f_{n+1} − f_n‖∞ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Give up when the step size has not reached a new minimum for this
    /// many steps.
    #[serde(default = "default_stall_window")]
    pub stall_window: usize,
}

fn default_stall_window() -> usize {
    50
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            tol: 1e-6,
            max_iter: 20_000,
            stall_window: default_stall_window(),
        }
    }
}

impl StopRule {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        let rule = StopRule {
            tol,
            max_iter,
            ..StopRule::default()
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!(
                "stop.tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("stop.max_iter must be at least 1".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::Config("stop.stall_window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    MaxIter,
    Stalled,
}

/// What a run did, step by step.
///
/// Entry `j` of every history describes the iterate `f_j`: its step
/// `‖f_{j+1} − f_j‖∞`, its sup distance to the oracle and its barrier margin.
/// The returned field is `f_{iterations−1}`, the last iterate whose step was
/// measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iterations: usize,
    pub verdict: Verdict,
    pub sup_diff_history: Vec<f64>,
    pub oracle_error_history: Vec<f64>,
    pub barrier_margin_history: Vec<f64>,
    pub wall_time_seconds: Option<f64>,
    pub config: serde_json::Value,
}

impl IterationReport {
    /// Infimum of the recorded oracle errors, if an oracle was attached.
    pub fn oracle_error_infimum(&self) -> Option<f64> {
        self.oracle_error_history.iter().copied().reduce(f64::min)
    }

    /// Largest increase between consecutive oracle errors (zero or negative
    /// when the history is non-increasing).
    pub fn worst_oracle_error_increase(&self) -> f64 {
        self.oracle_error_history
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_barrier_margin(&self) -> Option<f64> {
        self.barrier_margin_history.iter().copied().reduce(f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Optional quantities tracked along the run.
#[derive(Debug, Clone, Default)]
pub struct Monitors {
    /// Reference solution sampled on the same lattice.
    pub oracle: Option<GridField>,
    /// Barrier bound `|f_n − u| ≤ K h`.
    pub sandwich: Option<Sandwich>,
}

/// `‖σ(f) − f‖∞`: how far `f` is from being its own ball mean.
pub fn fixed_point_residual(
    op: &AveragingOperator,
    f: &GridField,
    boundary: &BoundaryValues,
) -> Result<f64> {
    op.apply(f, boundary)?.sup_diff(f)
}

/// Iterates σ from `f0` until the stop rule fires.
pub fn run(
    op: &AveragingOperator,
    f0: GridField,
    boundary: &BoundaryValues,
    stop: &StopRule,
    monitors: &Monitors,
) -> Result<(GridField, IterationReport)> {
    run_observed(op, f0, boundary, stop, monitors, |_, _| {})
}

/// [`run`], calling `observe(step, sup_diff)` after every step.
pub fn run_observed(
    op: &AveragingOperator,
    f0: GridField,
    boundary: &BoundaryValues,
    stop: &StopRule,
    monitors: &Monitors,
    mut observe: impl FnMut(usize, f64),
) -> Result<(GridField, IterationReport)> {
    stop.validate()?;
    let start = Instant::now();
    let mut current = f0;
    let mut next = current.clone();
    let mut report = IterationReport {
        iterations: 0,
        verdict: Verdict::MaxIter,
        sup_diff_history: Vec::new(),
        oracle_error_history: Vec::new(),
        barrier_margin_history: Vec::new(),
        wall_time_seconds: None,
        config: serde_json::Value::Null,
    };
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    for step in 0..stop.max_iter {
        if let Some(u) = &monitors.oracle {
            report.oracle_error_history.push(current.sup_diff(u)?);
        }
        if let Some(s) = &monitors.sandwich {
            report
                .barrier_margin_history
                .push(s.min_margin(&current)?.margin);
        }
        op.apply_into(&current, boundary, &mut next)?;
        let diff = next.sup_diff(&current)?;
        report.sup_diff_history.push(diff);
        report.iterations = step + 1;
        observe(step + 1, diff);
        if diff <= stop.tol {
            report.verdict = Verdict::Converged;
            break;
        }
        if diff < best {
            best = diff;
            best_at = step;
        } else if step - best_at >= stop.stall_window {
            report.verdict = Verdict::Stalled;
            break;
        }
        if step + 1 < stop.max_iter {
            std::mem::swap(&mut current, &mut next);
        }
    }
    report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    Ok((current, report))
}
