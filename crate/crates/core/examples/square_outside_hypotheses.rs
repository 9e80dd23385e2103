//! The unit square is convex but not strongly convex, so the convergence
//! theorem does not cover it. The iteration runs anyway; here against the
//! harmonic function e^x sin y.
//!
//! cargo run --release --example square_outside_hypotheses

use std::sync::Arc;

use harmavg::{
    run, AveragingOperator, BoundaryData, BoundaryValues, Domain, GridField, GridSpec, Lattice,
    Monitors, QuadratureSpec, RadiusSpec, StopRule,
};

fn main() -> harmavg::Result<()> {
    let square = Domain::cuboid(&[0.0, 0.0], &[1.0, 1.0])?;
    println!("convexity: {:?}", square.convexity());
    let exact = |x: &[f64]| x[0].exp() * x[1].sin();
    let data = BoundaryData::function(exact);
    for nodes in [33, 65] {
        let lattice = Arc::new(Lattice::new(
            square.clone(),
            GridSpec::tight_uniform(&square, nodes)?,
        )?);
        let op = AveragingOperator::new(
            lattice.clone(),
            RadiusSpec::default(),
            QuadratureSpec::default(),
        )?;
        let boundary = BoundaryValues::sample(&lattice, &data)?;
        let monitors = Monitors {
            oracle: Some(GridField::from_fn(lattice.clone(), exact)),
            sandwich: None,
        };
        let f0 = GridField::with_boundary(lattice.clone(), |_| 0.0, &data);
        let (_, report) = run(&op, f0, &boundary, &StopRule::new(1e-8, 50_000)?, &monitors)?;
        println!(
            "{nodes} nodes: {:?} after {} iterations, sup error {:.3e}, error history non-increasing: {}",
            report.verdict,
            report.iterations,
            report.oracle_error_history.last().unwrap(),
            report.worst_oracle_error_increase() <= 1e-12
        );
    }
    Ok(())
}
