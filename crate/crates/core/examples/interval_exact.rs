//! On an interval the fixed point is the straight line between the end
//! values, whatever the start.
//!
//! cargo run --release --example interval_exact

use std::sync::Arc;

use harmavg::{
    run, AveragingOperator, BoundaryData, BoundaryValues, Domain, GridField, GridSpec, Lattice,
    Monitors, QuadratureSpec, RadiusSpec, StopRule,
};

fn main() -> harmavg::Result<()> {
    let unit = Domain::interval(0.0, 1.0)?;
    let data = BoundaryData::Endpoints {
        lower: 2.0,
        upper: -1.0,
    };
    for nodes in [65, 257, 1025] {
        let lattice = Arc::new(Lattice::new(
            unit.clone(),
            GridSpec::tight_uniform(&unit, nodes)?,
        )?);
        let op = AveragingOperator::new(
            lattice.clone(),
            RadiusSpec::default(),
            QuadratureSpec::default(),
        )?;
        let boundary = BoundaryValues::sample(&lattice, &data)?;
        let f0 = GridField::with_boundary(
            lattice.clone(),
            |x| (20.0 * x[0]).sin() + 3.0 * x[0] * x[0],
            &data,
        );
        let (f, report) = run(
            &op,
            f0,
            &boundary,
            &StopRule::new(1e-10, 500_000)?,
            &Monitors::default(),
        )?;
        let line = GridField::from_fn(lattice, |x| 2.0 - 3.0 * x[0]);
        println!(
            "{nodes:5} nodes: {:?} after {:6} iterations, sup error vs 2 - 3x = {:.2e}",
            report.verdict,
            report.iterations,
            f.sup_diff(&line)?
        );
    }
    Ok(())
}
