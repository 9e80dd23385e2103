//! `harmavg study`: one solve per value of a swept parameter.

use std::fmt::Write as _;

use super::config::{Nodes, RunConfig};
use super::{solve, EXIT_OK};
use crate::averaging::{QuadratureSpec, RadiusSpec};
use crate::error::{Error, Result};
use crate::iteration::{fixed_point_residual, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Nodes per axis.
    Resolution,
    /// Radius fraction `c`.
    C,
    /// Samples per axis (product rule) or total samples (Monte Carlo).
    Samples,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Resolution => "resolution",
            SweepParam::C => "c",
            SweepParam::Samples => "samples",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Parses `name=v1,v2,...` with `name` one of `resolution`, `c`, `samples`.
pub fn parse_sweep(spec: &str) -> Result<Sweep> {
    let (name, list) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("sweep `{spec}`: expected name=v1,v2,...")))?;
    let param = match name.trim() {
        "resolution" => SweepParam::Resolution,
        "c" => SweepParam::C,
        "samples" => SweepParam::Samples,
        other => return Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
    };
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sweep value `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Config("empty sweep list".into()));
    }
    let integral = |v: f64| v >= 1.0 && v.fract() == 0.0;
    if param != SweepParam::C && !values.iter().all(|&v| integral(v)) {
        return Err(Error::Config(format!(
            "sweep `{name}` takes positive integers"
        )));
    }
    Ok(Sweep { param, values })
}

fn with_value(config: &RunConfig, param: SweepParam, v: f64) -> Result<RunConfig> {
    let mut c = config.clone();
    match param {
        SweepParam::Resolution => c.grid.nodes = Nodes::Uniform(v as usize),
        SweepParam::C => {
            c.radius = match c.radius {
                RadiusSpec::DistanceFraction { .. } => RadiusSpec::DistanceFraction { c: v },
                RadiusSpec::CappedFraction { cap, .. } => RadiusSpec::CappedFraction { c: v, cap },
            }
        }
        SweepParam::Samples => {
            c.quadrature = match c.quadrature {
                QuadratureSpec::ProductMidpoint { .. } => QuadratureSpec::ProductMidpoint {
                    samples_per_axis: v as usize,
                },
                QuadratureSpec::MonteCarlo { seed, .. } => QuadratureSpec::MonteCarlo {
                    samples: v as usize,
                    seed,
                },
            }
        }
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub value: f64,
    pub iterations: usize,
    pub verdict: Verdict,
    /// Sup error of the returned field against the oracle.
    pub final_oracle_error: Option<f64>,
    /// `‖σ(u) − u‖∞` for the oracle, or for the returned field without one.
    pub one_step_residual: f64,
}

/// Solves once per sweep value, in the given order.
pub fn run_study(config: &RunConfig, sweep: &Sweep, quiet: bool) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::with_capacity(sweep.values.len());
    for &v in &sweep.values {
        let c = with_value(config, sweep.param, v)?;
        let (field, report) = solve(&c, true)?;
        let inst = c.build()?;
        let (final_oracle_error, one_step_residual) = match &inst.oracle {
            Some(o) => {
                let u = o.sample(&inst.lattice)?;
                (
                    Some(field.sup_diff(&u)?),
                    fixed_point_residual(&inst.operator, &u, &inst.boundary)?,
                )
            }
            None => (
                None,
                fixed_point_residual(&inst.operator, &field, &inst.boundary)?,
            ),
        };
        if !quiet {
            eprintln!(
                "{}={v}: {:?} after {} iterations",
                sweep.param.name(),
                report.verdict,
                report.iterations
            );
        }
        rows.push(StudyRow {
            value: v,
            iterations: report.iterations,
            verdict: report.verdict,
            final_oracle_error,
            one_step_residual,
        });
    }
    Ok(rows)
}

pub fn study_csv(param: SweepParam, rows: &[StudyRow]) -> String {
    let mut out =
        String::from("parameter,value,iterations,verdict,final_oracle_error,one_step_residual\n");
    for r in rows {
        let verdict = serde_json::to_value(r.verdict).unwrap();
        let err = r
            .final_oracle_error
            .map_or("nan".to_string(), |e| format!("{e:.16e}"));
        writeln!(
            out,
            "{},{},{},{},{err},{:.16e}",
            param.name(),
            r.value,
            r.iterations,
            verdict.as_str().unwrap(),
            r.one_step_residual
        )
        .unwrap();
    }
    out
}

/// `harmavg study`: writes the table to `outputs.study_csv`, or to standard
/// output when that is unset.
pub fn cmd_study(config: &RunConfig, sweep: &str, quiet: bool) -> Result<u8> {
    let sweep = parse_sweep(sweep)?;
    let rows = run_study(config, &sweep, quiet)?;
    let text = study_csv(sweep.param, &rows);
    match &config.outputs.study_csv {
        Some(p) => {
            let path = config.output_path(p);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_specs() {
        let s = parse_sweep("resolution=65,129, 257").unwrap();
        assert_eq!(s.param, SweepParam::Resolution);
        assert_eq!(s.values, vec![65.0, 129.0, 257.0]);
        assert_eq!(parse_sweep("c=0.25,0.5").unwrap().values, vec![0.25, 0.5]);
        assert!(parse_sweep("c=").is_err());
        assert!(parse_sweep("resolution=").is_err());
        assert!(parse_sweep("resolution=6.5").is_err());
        assert!(parse_sweep("tol=1e-3").is_err());
        assert!(parse_sweep("c").is_err());
    }
}
